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

#include "restoplan/feeder.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"

namespace restoplan {

using nlohmann::json;

namespace {

constexpr double kSwitchEpsZ = 1e-6;  // ohm

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw FeederError(path + ": " + what);
}

const json& member(const json& j, const std::string& path, const std::string& key) {
    if (!j.is_object()) fail(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) fail(path, "missing field '" + key + "'");
    return *it;
}

std::string get_string(const json& j, const std::string& path, const std::string& key) {
    const json& v = member(j, path, key);
    if (!v.is_string()) fail(path + "." + key, "expected a string");
    return v.get<std::string>();
}

double get_number(const json& j, const std::string& path, const std::string& key) {
    const json& v = member(j, path, key);
    if (!v.is_number()) fail(path + "." + key, "expected a number");
    return v.get<double>();
}

bool get_bool(const json& j, const std::string& path, const std::string& key) {
    const json& v = member(j, path, key);
    if (!v.is_boolean()) fail(path + "." + key, "expected a boolean");
    return v.get<bool>();
}

std::vector<double> get_profile(const json& j, const std::string& path, const std::string& key) {
    const json& v = member(j, path, key);
    if (!v.is_array()) fail(path + "." + key, "expected an array");
    std::vector<double> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number()) fail(path + "." + key + "[" + std::to_string(i) + "]", "expected a number");
        out.push_back(v[i].get<double>());
    }
    return out;
}

// Disjoint-set over bus indices.
struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

std::vector<Phase> PhaseSet::list() const {
    std::vector<Phase> out;
    for (Phase p : {Phase::a, Phase::b, Phase::c}) {
        if (has(p)) out.push_back(p);
    }
    return out;
}

std::string PhaseSet::str() const {
    std::string s;
    for (Phase p : list()) s += phase_name(p);
    return s;
}

PhaseSet parse_phases(const std::string& s) {
    PhaseSet out;
    for (char c : s) {
        switch (c) {
            case 'a': out.add(Phase::a); break;
            case 'b': out.add(Phase::b); break;
            case 'c': out.add(Phase::c); break;
            default: throw FeederError(std::string("invalid phase character '") + c + "'");
        }
    }
    return out;
}

Phase parse_phase(const std::string& s) {
    if (s == "a") return Phase::a;
    if (s == "b") return Phase::b;
    if (s == "c") return Phase::c;
    throw FeederError("invalid phase '" + s + "'");
}

std::string phase_name(Phase p) {
    switch (p) {
        case Phase::a: return "a";
        case Phase::b: return "b";
        case Phase::c: return "c";
    }
    return "?";
}

double BaseQuantities::z_base_ohm() const {
    const double v_ln_v = v_kv_ll / std::sqrt(3.0) * 1000.0;
    const double s_phase_va = s_phase_kva() * 1000.0;
    return v_ln_v * v_ln_v / s_phase_va;
}

const Bus& FeederModel::bus(const std::string& id) const { return buses[static_cast<std::size_t>(bus_index(id))]; }
const Line& FeederModel::line(const std::string& id) const { return lines[static_cast<std::size_t>(line_index(id))]; }

int FeederModel::bus_index(const std::string& id) const {
    auto it = bus_idx_.find(id);
    if (it == bus_idx_.end()) throw FeederError("unknown bus '" + id + "'");
    return it->second;
}

int FeederModel::line_index(const std::string& id) const {
    auto it = line_idx_.find(id);
    if (it == line_idx_.end()) throw FeederError("unknown line '" + id + "'");
    return it->second;
}

int FeederModel::block_index(const std::string& id) const {
    auto it = block_idx_.find(id);
    if (it == block_idx_.end()) throw FeederError("unknown block '" + id + "'");
    return it->second;
}

int FeederModel::block_of_bus(const std::string& bus_id) const {
    auto it = block_of_bus_.find(bus_id);
    if (it == block_of_bus_.end()) throw FeederError("bus '" + bus_id + "' not in any block");
    return it->second;
}

const GfmiUnit* FeederModel::gfmi_at(const std::string& bus_id) const {
    for (const auto& g : gfmis) {
        if (g.bus == bus_id) return &g;
    }
    return nullptr;
}

std::vector<int> FeederModel::switch_line_indices() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].is_switch()) out.push_back(static_cast<int>(i));
    }
    return out;
}

void FeederModel::refresh() {
    bus_idx_.clear();
    line_idx_.clear();
    block_idx_.clear();
    block_of_bus_.clear();
    for (std::size_t i = 0; i < buses.size(); ++i) {
        if (!bus_idx_.emplace(buses[i].id, static_cast<int>(i)).second) {
            fail("buses", "duplicate bus id '" + buses[i].id + "'");
        }
    }
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (!line_idx_.emplace(lines[i].id, static_cast<int>(i)).second) {
            fail("lines", "duplicate line '" + lines[i].id + "'");
        }
    }
    blocks = partition_blocks(*this);
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        block_idx_.emplace(blocks[i].id, static_cast<int>(i));
        for (const auto& b : blocks[i].buses) block_of_bus_[b] = static_cast<int>(i);
    }
}

bool FeederModel::operator==(const FeederModel& other) const {
    return buses == other.buses && lines == other.lines && loads == other.loads &&
           pvs == other.pvs && gfmis == other.gfmis && tg == other.tg &&
           horizon == other.horizon && base == other.base && clpu == other.clpu;
}

std::vector<BusBlock> partition_blocks(const FeederModel& model) {
    const int n = static_cast<int>(model.buses.size());
    std::unordered_map<std::string, int> idx;
    for (int i = 0; i < n; ++i) idx.emplace(model.buses[static_cast<std::size_t>(i)].id, i);

    UnionFind uf(n);
    for (const auto& line : model.lines) {
        if (line.is_switch()) continue;
        uf.unite(idx.at(line.from), idx.at(line.to));
    }

    std::map<int, std::vector<std::string>> groups;  // root -> bus ids
    for (int i = 0; i < n; ++i) {
        groups[uf.find(i)].push_back(model.buses[static_cast<std::size_t>(i)].id);
    }

    std::vector<BusBlock> blocks;
    blocks.reserve(groups.size());
    for (auto& [root, bus_ids] : groups) {
        std::sort(bus_ids.begin(), bus_ids.end());
        BusBlock blk;
        blk.buses = std::move(bus_ids);
        blocks.push_back(std::move(blk));
    }
    std::sort(blocks.begin(), blocks.end(),
              [](const BusBlock& a, const BusBlock& b) { return a.buses.front() < b.buses.front(); });

    std::unordered_map<std::string, int> bus_block;
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        blocks[k].id = "B" + std::to_string(k + 1);
        for (const auto& b : blocks[k].buses) bus_block[b] = static_cast<int>(k);
    }
    for (const auto& line : model.lines) {
        const int bf = bus_block.at(line.from);
        const int bt = bus_block.at(line.to);
        if (line.is_switch()) {
            blocks[static_cast<std::size_t>(bf)].boundary_switches.push_back(line.id);
            if (bt != bf) blocks[static_cast<std::size_t>(bt)].boundary_switches.push_back(line.id);
        } else {
            blocks[static_cast<std::size_t>(bf)].internal_lines.push_back(line.id);
        }
    }
    return blocks;
}

std::map<std::string, std::pair<std::string, std::string>> block_adjacency(const FeederModel& model) {
    std::map<std::string, std::pair<std::string, std::string>> out;
    for (const auto& line : model.lines) {
        if (!line.is_switch()) continue;
        const auto& bf = model.blocks[static_cast<std::size_t>(model.block_of_bus(line.from))];
        const auto& bt = model.blocks[static_cast<std::size_t>(model.block_of_bus(line.to))];
        if (bf.id == bt.id) {
            fail("lines", "switch '" + line.id + "' joins block " + bf.id + " to itself");
        }
        out.emplace(line.id, std::make_pair(bf.id, bt.id));
    }
    return out;
}

FlowSensitivity flow_sensitivity(const Line& line) {
    // a = exp(-j*2*pi/3); G[p][q] = a^((q-p) mod 3) across the full abc
    // frame, restricted afterward to the line's phases.
    const std::complex<double> a = std::polar(1.0, -2.0 * 3.14159265358979323846 / 3.0);
    const std::complex<double> g_pow[3] = {{1.0, 0.0}, a, a * a};

    const auto phases = line.phases.list();
    const std::size_t k = phases.size();
    FlowSensitivity out;
    out.rbar.assign(k, std::vector<double>(k, 0.0));
    out.xbar.assign(k, std::vector<double>(k, 0.0));
    for (std::size_t r = 0; r < k; ++r) {
        for (std::size_t c = 0; c < k; ++c) {
            const int pr = static_cast<int>(phases[r]);
            const int pc = static_cast<int>(phases[c]);
            const std::complex<double> g = g_pow[((pc - pr) % 3 + 3) % 3];
            const std::complex<double> v = g * std::conj(line.z[r][c]);
            out.rbar[r][c] = v.real();
            out.xbar[r][c] = -v.imag();
        }
    }
    return out;
}

namespace {

void validate_model(FeederModel& m) {
    // Buses.
    int tg_kind_count = 0;
    for (std::size_t i = 0; i < m.buses.size(); ++i) {
        const auto& b = m.buses[i];
        const std::string path = "buses[" + std::to_string(i) + "]";
        if (b.phases.empty()) fail(path + ".phases", "phase set must be non-empty");
        if (b.kind == BusKind::tg_interconnect) ++tg_kind_count;
    }

    // Lines.
    for (std::size_t i = 0; i < m.lines.size(); ++i) {
        const auto& l = m.lines[i];
        const std::string path = "lines[" + std::to_string(i) + "]";
        if (!m.has_bus(l.from)) fail(path + ".from", "unknown bus '" + l.from + "'");
        if (!m.has_bus(l.to)) fail(path + ".to", "unknown bus '" + l.to + "'");
        if (l.from == l.to) fail(path, "line endpoints coincide");
        const PhaseSet common = m.bus(l.from).phases.intersect(m.bus(l.to).phases);
        if (!l.phases.subset_of(common)) {
            fail(path + ".phases", "line phases must be a subset of both endpoint phase sets");
        }
        if (l.phases.empty()) fail(path + ".phases", "phase set must be non-empty");
        const std::size_t k = static_cast<std::size_t>(l.phases.count());
        if (l.z.size() != k) fail(path + ".r_matrix", "expected a " + std::to_string(k) + "x" + std::to_string(k) + " matrix");
        for (const auto& row : l.z) {
            if (row.size() != k) fail(path + ".r_matrix", "ragged impedance matrix");
        }
        if (l.is_switch()) {
            for (const auto& row : l.z) {
                for (const auto& z : row) {
                    if (std::abs(z) > kSwitchEpsZ) {
                        fail(path, "switch impedance exceeds eps_z = 1e-6 ohm");
                    }
                }
            }
        }
    }

    // Loads: switchable and non-switchable must not share a bus.
    std::map<std::string, int> bus_load_kind;  // 0 none, 1 switchable, 2 hard-wired
    std::map<std::string, int> seen_load;
    for (std::size_t i = 0; i < m.loads.size(); ++i) {
        const auto& d = m.loads[i];
        const std::string path = "loads[" + std::to_string(i) + "]";
        if (!m.has_bus(d.bus)) fail(path + ".bus", "unknown bus '" + d.bus + "'");
        if (!m.bus(d.bus).phases.has(d.phase)) {
            fail(path + ".phase", "bus '" + d.bus + "' has no phase " + phase_name(d.phase));
        }
        if (!(std::abs(d.pf_angle) < 1.5707963267948966)) {
            fail(path + ".pf_angle", "must lie strictly inside (-pi/2, pi/2)");
        }
        if (static_cast<int>(d.profile.size()) < m.horizon.steps) {
            fail(path + ".profile", "shorter than the horizon");
        }
        const int kind = d.switchable ? 1 : 2;
        auto [it, fresh] = bus_load_kind.emplace(d.bus, kind);
        if (!fresh && it->second != kind) {
            fail(path, "switchable and non-switchable loads share bus '" + d.bus + "'");
        }
        if (!seen_load.emplace(d.id(), 1).second) fail(path, "duplicate load " + d.id());
    }

    // PVs.
    for (std::size_t i = 0; i < m.pvs.size(); ++i) {
        const auto& pv = m.pvs[i];
        const std::string path = "pvs[" + std::to_string(i) + "]";
        if (!m.has_bus(pv.bus)) fail(path + ".bus", "unknown bus '" + pv.bus + "'");
        if (!pv.phases.subset_of(m.bus(pv.bus).phases)) fail(path + ".phases", "not present at bus");
        if (pv.phases.empty()) fail(path + ".phases", "phase set must be non-empty");
        if (!(pv.rated_kw > 0.0)) fail(path + ".rated_kw", "must be > 0");
        if (static_cast<int>(pv.profile.size()) < m.horizon.steps) fail(path + ".profile", "shorter than the horizon");
        for (std::size_t t = 0; t < pv.profile.size(); ++t) {
            if (pv.profile[t] > pv.rated_kw * (1.0 + 1e-9)) {
                fail(path + ".profile[" + std::to_string(t) + "]", "forecast exceeds rated_kw");
            }
        }
    }

    // GFMIs: one per bus, on gfmi_root buses only, and vice versa.
    std::map<std::string, int> gfmi_bus;
    for (std::size_t i = 0; i < m.gfmis.size(); ++i) {
        const auto& g = m.gfmis[i];
        const std::string path = "gfmis[" + std::to_string(i) + "]";
        if (!m.has_bus(g.bus)) fail(path + ".bus", "unknown bus '" + g.bus + "'");
        if (m.bus(g.bus).kind != BusKind::gfmi_root) fail(path + ".bus", "bus kind must be gfmi_root");
        if (!gfmi_bus.emplace(g.bus, 1).second) fail(path + ".bus", "more than one GFMI at bus '" + g.bus + "'");
        try {
            g.params.validate();
        } catch (const std::invalid_argument& e) {
            fail(path, e.what());
        }
    }
    for (const auto& b : m.buses) {
        if (b.kind == BusKind::gfmi_root && !gfmi_bus.count(b.id)) {
            fail("buses", "bus '" + b.id + "' is gfmi_root but has no GFMI entry");
        }
    }

    // TG interconnect.
    if (m.tg) {
        if (!m.has_bus(m.tg->bus)) fail("tg.bus", "unknown bus '" + m.tg->bus + "'");
        if (m.bus(m.tg->bus).kind != BusKind::tg_interconnect) {
            fail("tg.bus", "bus kind must be tg_interconnect");
        }
        if (!(m.tg->ss_rat_kva > 0.0)) fail("tg.ss_rat_kva", "must be > 0");
        if (m.tg->recovery_step < 1) fail("tg.recovery_step", "must be >= 1");
        if (tg_kind_count != 1) fail("buses", "exactly one tg_interconnect bus expected");
    } else if (tg_kind_count != 0) {
        fail("buses", "tg_interconnect bus present but no tg section");
    }

    if (m.horizon.steps < 1) fail("horizon.steps", "must be >= 1");
    if (!(m.horizon.dt_minutes > 0.0)) fail("horizon.dt_minutes", "must be > 0");
    try {
        m.clpu.validate();
    } catch (const std::invalid_argument& e) {
        fail("clpu", e.what());
    }

    // Connectivity with every switch closed.
    if (!m.buses.empty()) {
        UnionFind uf(static_cast<int>(m.buses.size()));
        for (const auto& l : m.lines) uf.unite(m.bus_index(l.from), m.bus_index(l.to));
        const int root = uf.find(0);
        for (std::size_t i = 1; i < m.buses.size(); ++i) {
            if (uf.find(static_cast<int>(i)) != root) {
                fail("lines", "graph with all switches closed is not connected (bus '" +
                                  m.buses[i].id + "' unreachable)");
            }
        }
    }

    // Each block's internal graph must be a spanning tree of the block;
    // the per-step radiality identity counts on it.
    for (const auto& blk : m.blocks) {
        if (blk.internal_lines.size() + 1 != blk.buses.size()) {
            fail("lines", "block " + blk.id + " is not internally radial (" +
                              std::to_string(blk.internal_lines.size()) + " lines for " +
                              std::to_string(blk.buses.size()) + " buses)");
        }
    }

    // The TG interconnection bus must sit alone behind switches so its
    // energization can follow the TG availability schedule.
    if (m.tg) {
        const auto& blk = m.blocks[static_cast<std::size_t>(m.block_of_bus(m.tg->bus))];
        if (blk.buses.size() != 1) {
            fail("tg.bus", "the TG bus must be separated from the feeder by switches");
        }
    }

    // Rejects switches that join a block to itself.
    block_adjacency(m);
}

json phases_to_json(PhaseSet p) { return json(p.str()); }

json matrix_to_json(const Line& l, bool real_part) {
    json rows = json::array();
    for (const auto& row : l.z) {
        json r = json::array();
        for (const auto& v : row) r.push_back(real_part ? v.real() : v.imag());
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace

FeederModel load_feeder(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw FeederError(std::string("document: not valid JSON (") + e.what() + ")");
    }
    if (!j.is_object()) throw FeederError("document: expected a JSON object");

    FeederModel m;

    const json& horizon = member(j, "document", "horizon");
    m.horizon.dt_minutes = get_number(horizon, "horizon", "dt_minutes");
    m.horizon.steps = static_cast<int>(get_number(horizon, "horizon", "steps"));
    m.horizon.start_label = horizon.contains("start_label") ? get_string(horizon, "horizon", "start_label") : "";

    if (j.contains("base") && !j["base"].is_null()) {
        const json& base = j["base"];
        m.base.v_kv_ll = get_number(base, "base", "v_kv_ll");
        m.base.s_kva = get_number(base, "base", "s_kva");
        if (!(m.base.v_kv_ll > 0.0) || !(m.base.s_kva > 0.0)) fail("base", "bases must be > 0");
    }

    if (j.contains("clpu") && !j["clpu"].is_null()) {
        const json& c = j["clpu"];
        m.clpu.a1 = get_number(c, "clpu", "alpha1");
        m.clpu.a2 = get_number(c, "clpu", "alpha2");
        m.clpu.a3 = get_number(c, "clpu", "alpha3");
    }

    const json& buses = member(j, "document", "buses");
    if (!buses.is_array()) fail("buses", "expected an array");
    for (std::size_t i = 0; i < buses.size(); ++i) {
        const std::string path = "buses[" + std::to_string(i) + "]";
        Bus b;
        b.id = get_string(buses[i], path, "id");
        try {
            b.phases = parse_phases(get_string(buses[i], path, "phases"));
        } catch (const FeederError& e) {
            fail(path + ".phases", e.what());
        }
        const std::string kind = get_string(buses[i], path, "kind");
        if (kind == "plain") b.kind = BusKind::plain;
        else if (kind == "gfmi_root") b.kind = BusKind::gfmi_root;
        else if (kind == "tg_interconnect") b.kind = BusKind::tg_interconnect;
        else fail(path + ".kind", "expected plain, gfmi_root, or tg_interconnect");
        m.buses.push_back(std::move(b));
    }

    const json& lines = member(j, "document", "lines");
    if (!lines.is_array()) fail("lines", "expected an array");
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::string path = "lines[" + std::to_string(i) + "]";
        Line l;
        l.from = get_string(lines[i], path, "from");
        l.to = get_string(lines[i], path, "to");
        l.id = l.from + "-" + l.to;
        try {
            l.phases = parse_phases(get_string(lines[i], path, "phases"));
        } catch (const FeederError& e) {
            fail(path + ".phases", e.what());
        }
        const json& sw = member(lines[i], path, "switch");
        if (sw.is_null()) l.switch_kind = SwitchKind::none;
        else if (sw == "ESW") l.switch_kind = SwitchKind::esw;
        else if (sw == "SSW") l.switch_kind = SwitchKind::ssw;
        else fail(path + ".switch", "expected null, \"ESW\", or \"SSW\"");

        const std::size_t k = static_cast<std::size_t>(l.phases.count());
        const bool has_r = lines[i].contains("r_matrix") && !lines[i]["r_matrix"].is_null();
        const bool has_x = lines[i].contains("x_matrix") && !lines[i]["x_matrix"].is_null();
        if (!has_r && !has_x && l.is_switch()) {
            l.z.assign(k, std::vector<std::complex<double>>(k, {0.0, 0.0}));
        } else {
            const json& rm = member(lines[i], path, "r_matrix");
            const json& xm = member(lines[i], path, "x_matrix");
            if (!rm.is_array() || rm.size() != k) fail(path + ".r_matrix", "expected " + std::to_string(k) + " rows");
            if (!xm.is_array() || xm.size() != k) fail(path + ".x_matrix", "expected " + std::to_string(k) + " rows");
            l.z.assign(k, std::vector<std::complex<double>>(k));
            for (std::size_t r = 0; r < k; ++r) {
                if (!rm[r].is_array() || rm[r].size() != k) fail(path + ".r_matrix", "ragged matrix");
                if (!xm[r].is_array() || xm[r].size() != k) fail(path + ".x_matrix", "ragged matrix");
                for (std::size_t c = 0; c < k; ++c) {
                    if (!rm[r][c].is_number() || !xm[r][c].is_number()) {
                        fail(path + ".r_matrix", "expected numbers");
                    }
                    l.z[r][c] = {rm[r][c].get<double>(), xm[r][c].get<double>()};
                }
            }
        }
        m.lines.push_back(std::move(l));
    }

    const json& loads = member(j, "document", "loads");
    if (!loads.is_array()) fail("loads", "expected an array");
    for (std::size_t i = 0; i < loads.size(); ++i) {
        const std::string path = "loads[" + std::to_string(i) + "]";
        Load d;
        d.bus = get_string(loads[i], path, "bus");
        try {
            d.phase = parse_phase(get_string(loads[i], path, "phase"));
        } catch (const FeederError& e) {
            fail(path + ".phase", e.what());
        }
        d.switchable = get_bool(loads[i], path, "switchable");
        d.pf_angle = get_number(loads[i], path, "pf_angle");
        d.profile = get_profile(loads[i], path, "profile");
        m.loads.push_back(std::move(d));
    }

    const json& pvs = member(j, "document", "pvs");
    if (!pvs.is_array()) fail("pvs", "expected an array");
    for (std::size_t i = 0; i < pvs.size(); ++i) {
        const std::string path = "pvs[" + std::to_string(i) + "]";
        PvUnit pv;
        pv.bus = get_string(pvs[i], path, "bus");
        try {
            pv.phases = parse_phases(get_string(pvs[i], path, "phases"));
        } catch (const FeederError& e) {
            fail(path + ".phases", e.what());
        }
        pv.rated_kw = get_number(pvs[i], path, "rated_kw");
        pv.profile = get_profile(pvs[i], path, "profile");
        m.pvs.push_back(std::move(pv));
    }

    const json& gfmis = member(j, "document", "gfmis");
    if (!gfmis.is_array()) fail("gfmis", "expected an array");
    for (std::size_t i = 0; i < gfmis.size(); ++i) {
        const std::string path = "gfmis[" + std::to_string(i) + "]";
        GfmiUnit g;
        g.bus = get_string(gfmis[i], path, "bus");
        g.params.s_rat = get_number(gfmis[i], path, "s_rat_kva");
        g.params.c = get_number(gfmis[i], path, "c_kwh");
        g.params.h = get_number(gfmis[i], path, "h");
        g.params.d = get_number(gfmis[i], path, "d");
        g.params.kf = get_number(gfmis[i], path, "kf");
        g.params.kv = get_number(gfmis[i], path, "kv");
        g.params.gamma = get_number(gfmis[i], path, "gamma");
        if (gfmis[i].contains("v_star")) g.params.v_star = get_number(gfmis[i], path, "v_star");
        if (gfmis[i].contains("f_star")) g.params.f_star = get_number(gfmis[i], path, "f_star");
        if (gfmis[i].contains("t_lp") && !gfmis[i]["t_lp"].is_null()) {
            g.params.t_lp = get_number(gfmis[i], path, "t_lp");
        }
        m.gfmis.push_back(std::move(g));
    }

    const json& tg = member(j, "document", "tg");
    if (!tg.is_null()) {
        TgInterconnect t;
        t.bus = get_string(tg, "tg", "bus");
        t.ss_rat_kva = get_number(tg, "tg", "ss_rat_kva");
        t.recovery_step = static_cast<int>(get_number(tg, "tg", "recovery_step"));
        m.tg = t;
    }

    m.refresh();
    validate_model(m);
    return m;
}

FeederModel load_feeder_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FeederError("cannot open feeder file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return load_feeder(ss.str());
}

std::string serialize_feeder(const FeederModel& m) {
    json j;
    j["horizon"] = {{"dt_minutes", m.horizon.dt_minutes},
                    {"steps", m.horizon.steps},
                    {"start_label", m.horizon.start_label}};
    j["base"] = {{"v_kv_ll", m.base.v_kv_ll}, {"s_kva", m.base.s_kva}};
    j["clpu"] = {{"alpha1", m.clpu.a1}, {"alpha2", m.clpu.a2}, {"alpha3", m.clpu.a3}};

    j["buses"] = json::array();
    for (const auto& b : m.buses) {
        const char* kind = b.kind == BusKind::plain ? "plain"
                           : b.kind == BusKind::gfmi_root ? "gfmi_root"
                                                          : "tg_interconnect";
        j["buses"].push_back({{"id", b.id}, {"phases", phases_to_json(b.phases)}, {"kind", kind}});
    }
    j["lines"] = json::array();
    for (const auto& l : m.lines) {
        json e = {{"from", l.from},
                  {"to", l.to},
                  {"phases", phases_to_json(l.phases)},
                  {"r_matrix", matrix_to_json(l, true)},
                  {"x_matrix", matrix_to_json(l, false)}};
        if (l.switch_kind == SwitchKind::none) e["switch"] = nullptr;
        else e["switch"] = l.switch_kind == SwitchKind::esw ? "ESW" : "SSW";
        j["lines"].push_back(std::move(e));
    }
    j["loads"] = json::array();
    for (const auto& d : m.loads) {
        j["loads"].push_back({{"bus", d.bus},
                              {"phase", phase_name(d.phase)},
                              {"switchable", d.switchable},
                              {"pf_angle", d.pf_angle},
                              {"profile", d.profile}});
    }
    j["pvs"] = json::array();
    for (const auto& pv : m.pvs) {
        j["pvs"].push_back({{"bus", pv.bus},
                            {"phases", phases_to_json(pv.phases)},
                            {"rated_kw", pv.rated_kw},
                            {"profile", pv.profile}});
    }
    j["gfmis"] = json::array();
    for (const auto& g : m.gfmis) {
        json e = {{"bus", g.bus},       {"s_rat_kva", g.params.s_rat}, {"c_kwh", g.params.c},
                  {"h", g.params.h},    {"d", g.params.d},             {"kf", g.params.kf},
                  {"kv", g.params.kv},  {"gamma", g.params.gamma},     {"v_star", g.params.v_star},
                  {"f_star", g.params.f_star}};
        if (g.params.t_lp) e["t_lp"] = *g.params.t_lp;
        j["gfmis"].push_back(std::move(e));
    }
    if (m.tg) {
        j["tg"] = {{"bus", m.tg->bus},
                   {"ss_rat_kva", m.tg->ss_rat_kva},
                   {"recovery_step", m.tg->recovery_step}};
    } else {
        j["tg"] = nullptr;
    }
    return j.dump(2);
}

}  // namespace restoplan
