// Copyright 2026 The restoplan Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RESTOPLAN_FEEDER_HPP
#define RESTOPLAN_FEEDER_HPP

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "restoplan/clpu.hpp"
#include "restoplan/der.hpp"

namespace restoplan {

/// Raised on any schema or consistency violation while loading a feeder.
/// The message carries the JSON path of the offending field.
class FeederError : public std::runtime_error {
  public:
    explicit FeederError(const std::string& what) : std::runtime_error(what) {}
};

enum class Phase : int { a = 0, b = 1, c = 2 };

/// Subset of the three phases, stored as a bit mask.
struct PhaseSet {
    std::uint8_t mask = 0;

    static PhaseSet all() { return PhaseSet{0x7}; }
    static PhaseSet single(Phase p) { return PhaseSet{static_cast<std::uint8_t>(1u << static_cast<int>(p))}; }

    bool has(Phase p) const { return (mask >> static_cast<int>(p)) & 1u; }
    void add(Phase p) { mask |= static_cast<std::uint8_t>(1u << static_cast<int>(p)); }
    int count() const { return ((mask >> 0) & 1) + ((mask >> 1) & 1) + ((mask >> 2) & 1); }
    bool empty() const { return mask == 0; }
    bool subset_of(PhaseSet other) const { return (mask & ~other.mask) == 0; }
    PhaseSet intersect(PhaseSet other) const { return PhaseSet{static_cast<std::uint8_t>(mask & other.mask)}; }

    std::vector<Phase> list() const;
    std::string str() const;  // e.g. "abc", "ac"

    bool operator==(const PhaseSet&) const = default;
};

PhaseSet parse_phases(const std::string& s);
Phase parse_phase(const std::string& s);
std::string phase_name(Phase p);

enum class BusKind { plain, gfmi_root, tg_interconnect };

struct Bus {
    std::string id;
    PhaseSet phases;
    BusKind kind = BusKind::plain;

    bool operator==(const Bus&) const = default;
};

enum class SwitchKind { none, esw, ssw };

/// A line section. Switches are represented as negligible-impedance lines;
/// their impedance entries must stay below eps_z and are treated as exact
/// zeros in the flow model.
struct Line {
    std::string id;  // "<from>-<to>", synthesized at load
    std::string from;
    std::string to;
    PhaseSet phases;
    // Row/column order follows phases.list(). Ohms.
    std::vector<std::vector<std::complex<double>>> z;
    SwitchKind switch_kind = SwitchKind::none;

    bool is_switch() const { return switch_kind != SwitchKind::none; }
    bool operator==(const Line&) const = default;
};

struct Load {
    std::string bus;
    Phase phase = Phase::a;
    bool switchable = false;
    double pf_angle = 0.0;             // rad
    std::vector<double> profile;       // diversified kW per step

    std::string id() const { return bus + "." + phase_name(phase); }
    bool operator==(const Load&) const = default;
};

struct PvUnit {
    std::string bus;
    PhaseSet phases;
    double rated_kw = 0.0;
    std::vector<double> profile;       // forecast kW per step

    bool operator==(const PvUnit&) const = default;
};

struct GfmiUnit {
    std::string bus;
    GfmiParams params;

    bool operator==(const GfmiUnit&) const = default;
};

struct TgInterconnect {
    std::string bus;
    double ss_rat_kva = 0.0;
    int recovery_step = 0;  // 1-based step at which the TG becomes available

    bool operator==(const TgInterconnect&) const = default;
};

struct Horizon {
    double dt_minutes = 15.0;
    int steps = 0;
    std::string start_label;  // e.g. "08:45"

    bool operator==(const Horizon&) const = default;
};

/// Per-unit bases used to scale the linearized flow model.
struct BaseQuantities {
    double v_kv_ll = 4.16;
    double s_kva = 1000.0;

    double z_base_ohm() const;      // per-phase impedance base
    double s_phase_kva() const { return s_kva / 3.0; }
    bool operator==(const BaseQuantities&) const = default;
};

/// Maximal switch-free group of buses; energized as a unit.
struct BusBlock {
    std::string id;                        // "B1", "B2", ... in partition order
    std::vector<std::string> buses;        // sorted
    std::vector<std::string> internal_lines;
    std::vector<std::string> boundary_switches;

    bool operator==(const BusBlock&) const = default;
};

class FeederModel {
  public:
    std::vector<Bus> buses;
    std::vector<Line> lines;
    std::vector<Load> loads;
    std::vector<PvUnit> pvs;
    std::vector<GfmiUnit> gfmis;
    std::optional<TgInterconnect> tg;
    Horizon horizon;
    BaseQuantities base;
    ClpuCoefficients clpu;

    // Derived at load/validation time.
    std::vector<BusBlock> blocks;

    const Bus& bus(const std::string& id) const;
    const Line& line(const std::string& id) const;
    bool has_bus(const std::string& id) const { return bus_idx_.count(id) != 0; }
    int bus_index(const std::string& id) const;
    int line_index(const std::string& id) const;
    int block_index(const std::string& id) const;
    /// Index of the block containing the bus.
    int block_of_bus(const std::string& bus_id) const;
    const GfmiUnit* gfmi_at(const std::string& bus_id) const;
    bool is_tg_bus(const std::string& bus_id) const { return tg && tg->bus == bus_id; }

    std::vector<int> switch_line_indices() const;

    /// Recomputes the block partition and all index maps. Called by
    /// load_feeder; call again after mutating the model by hand in tests.
    void refresh();

    bool operator==(const FeederModel& other) const;

  private:
    std::unordered_map<std::string, int> bus_idx_;
    std::unordered_map<std::string, int> line_idx_;
    std::unordered_map<std::string, int> block_idx_;
    std::unordered_map<std::string, int> block_of_bus_;
};

/// Parses and fully validates a feeder description (JSON text).
/// Throws FeederError with the offending path on any violation.
FeederModel load_feeder(const std::string& json_text);
FeederModel load_feeder_file(const std::string& path);

/// Serializes a model back to the exchange format. load_feeder on the
/// output yields an equal model.
std::string serialize_feeder(const FeederModel& model);

/// Connected components after deleting switch edges, ordered by smallest
/// contained bus id. Total on valid models.
std::vector<BusBlock> partition_blocks(const FeederModel& model);

/// Maps every switch to the pair of blocks it joins. A switch joining a
/// block to itself is a model error (FeederError).
std::map<std::string, std::pair<std::string, std::string>> block_adjacency(const FeederModel& model);

/// Sensitivity matrices of the linearized unbalanced flow model, in ohms,
/// restricted to the line's phases: Rbar = Re(G .* conj(Z)),
/// Xbar = -Im(G .* conj(Z)) with G the rotation matrix built from
/// a = exp(-j*2*pi/3).
struct FlowSensitivity {
    std::vector<std::vector<double>> rbar;
    std::vector<std::vector<double>> xbar;
};
FlowSensitivity flow_sensitivity(const Line& line);

}  // namespace restoplan

#endif  // RESTOPLAN_FEEDER_HPP
