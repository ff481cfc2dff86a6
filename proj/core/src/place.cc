/*
 *  ipnr -- a miniature island-style FPGA place-and-route flow
 *
 *  Permission to use, copy, modify, and/or distribute this software for any
 *  purpose with or without fee is hereby granted, provided that the above
 *  copyright notice and this permission notice appear in all copies.
 *
 *  THE SOFTWARE IS PROVIDED "AS IS" AND THE AUTHOR DISCLAIMS ALL WARRANTIES
 *  WITH REGARD TO THIS SOFTWARE.
 */

#include "ipnr/place.hh"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "ipnr/pack.hh"

namespace ipnr {

namespace {

constexpr double B2B_EPS = 1e-3;
constexpr double B2B_WMIN = 1e-4;
constexpr double B2B_WMAX = 1e4;

double rnd01(std::mt19937_64 &rng) { return double(rng() >> 11) * 0x1.0p-53; }

BindingState::BoundCell bound_cell(const std::string &name, const Cell &c)
{
    BindingState::BoundCell bc;
    bc.name = name;
    bc.kind = c.type == "PAD" ? BelKind::PAD : BelKind::LUTFF;
    auto fit = c.params.find("FF_ENABLE");
    bc.ff_enable = fit != c.params.end() && fit->second.get<int>() != 0;
    auto cit = c.conns.find("CLK");
    bc.clock_net = cit == c.conns.end() ? -1 : cit->second;
    return bc;
}

// Nets that matter for placement cost: cell pins only, clock nets excluded.
struct NetPins
{
    int32_t net;
    std::vector<PortRef> pins; // pins[0] is the driver when present
};

std::vector<NetPins> real_nets(const Netlist &n)
{
    auto table = n.net_table();
    auto clkv = clock_nets(n);
    std::set<int32_t> clk(clkv.begin(), clkv.end());
    std::vector<NetPins> out;
    for (int32_t i = 0; i < n.num_nets; i++) {
        if (clk.count(i))
            continue;
        NetPins np;
        np.net = i;
        if (table[size_t(i)].driver && !table[size_t(i)].driver->cell.empty())
            np.pins.push_back(*table[size_t(i)].driver);
        for (const auto &s : table[size_t(i)].sinks)
            if (!s.cell.empty())
                np.pins.push_back(s);
        if (np.pins.size() >= 2)
            out.push_back(std::move(np));
    }
    return out;
}

struct Rect
{
    int32_t x0, y0, x1, y1;
    bool contains(int32_t x, int32_t y) const { return x >= x0 && x <= x1 && y >= y0 && y <= y1; }
};

// Intersection of all region constraints matching the cell, if any.
std::optional<Rect> cell_region(const PlaceConstraints &cons, const std::string &name)
{
    std::optional<Rect> r;
    for (const auto &reg : cons.regions)
        if (glob_match(reg.glob, name)) {
            Rect rr{reg.x0, reg.y0, reg.x1, reg.y1};
            if (!r)
                r = rr;
            else
                r = Rect{std::max(r->x0, rr.x0), std::max(r->y0, rr.y0), std::min(r->x1, rr.x1),
                         std::min(r->y1, rr.y1)};
        }
    return r;
}

bool region_ok(const PlaceConstraints &cons, const std::string &name, BelId b)
{
    auto r = cell_region(cons, name);
    return !r || r->contains(b.x, b.y);
}

} // namespace

bool glob_match(const std::string &pattern, const std::string &name)
{
    // Iterative '*' matcher; no other metacharacters.
    size_t p = 0, s = 0, star = std::string::npos, mark = 0;
    while (s < name.size()) {
        if (p < pattern.size() && (pattern[p] == name[s])) {
            p++;
            s++;
        } else if (p < pattern.size() && pattern[p] == '*') {
            star = p++;
            mark = s;
        } else if (star != std::string::npos) {
            p = star + 1;
            s = ++mark;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '*')
        p++;
    return p == pattern.size();
}

PlaceConstraints parse_pcf(const std::string &text)
{
    PlaceConstraints cons;
    std::istringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        lineno++;
        auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        std::istringstream ls(line);
        std::string cmd;
        if (!(ls >> cmd))
            continue;
        if (cmd == "set_io") {
            std::string port, pad;
            if (!(ls >> port >> pad))
                throw ConstraintSyntaxError("line " + std::to_string(lineno) + ": set_io needs <port> <pad>");
            cons.set_io[port] = pad;
        } else if (cmd == "region") {
            Region r;
            if (!(ls >> r.glob >> r.x0 >> r.y0 >> r.x1 >> r.y1))
                throw ConstraintSyntaxError("line " + std::to_string(lineno) +
                                            ": region needs <glob> x0 y0 x1 y1");
            cons.regions.push_back(r);
        } else {
            throw ConstraintSyntaxError("line " + std::to_string(lineno) + ": unknown directive '" + cmd + "'");
        }
    }
    return cons;
}

double hpwl(const DeviceDB &db, const Netlist &n, const Placement &p)
{
    (void)db;
    double total = 0;
    for (const auto &np : real_nets(n)) {
        int32_t xmin = INT32_MAX, xmax = INT32_MIN, ymin = INT32_MAX, ymax = INT32_MIN;
        for (const auto &pin : np.pins) {
            BelId b = p.bel_of(pin.cell);
            xmin = std::min<int32_t>(xmin, b.x);
            xmax = std::max<int32_t>(xmax, b.x);
            ymin = std::min<int32_t>(ymin, b.y);
            ymax = std::max<int32_t>(ymax, b.y);
        }
        total += double(xmax - xmin) + double(ymax - ymin);
    }
    return total;
}

double timing_cost(const DeviceDB &db, const Netlist &n, const Placement &p, const DelayModel &model,
                   const std::map<PinKey, double> &criticality)
{
    double total = 0;
    for (const auto &np : real_nets(n)) {
        const PortRef &drv = np.pins[0];
        WireId src = db.bel_pin_wire(p.bel_of(drv.cell), drv.port);
        for (size_t i = 1; i < np.pins.size(); i++) {
            const PortRef &snk = np.pins[i];
            auto cit = criticality.find({snk.cell, snk.port});
            double crit = cit == criticality.end() ? 0.0 : cit->second;
            if (crit <= 0)
                continue;
            WireId dst = db.bel_pin_wire(p.bel_of(snk.cell), snk.port);
            total += crit * double(estimate_delay(db, src, dst, model));
        }
    }
    return total;
}

Placement initial_placement(const Netlist &n, const DeviceDB &db, const PlaceConstraints &cons, uint64_t seed)
{
    Placement p;
    p.seed = seed;
    std::mt19937_64 rng(seed);
    BindingState st;

    for (const auto &[port, padname] : cons.set_io) {
        auto cit = n.cells.find(port);
        if (cit == n.cells.end())
            throw UnsatisfiableConstraint("set_io names unknown cell '" + port + "'");
        auto bel = db.pad_by_name(padname);
        if (!bel)
            throw UnsatisfiableConstraint("set_io names unknown pad '" + padname + "'");
        auto bc = bound_cell(port, cit->second);
        if (!region_ok(cons, port, *bel) || !check_bel_validity(db, st, bc, *bel))
            throw UnsatisfiableConstraint("pad '" + padname + "' invalid or already taken for '" + port + "'");
        st.bind_bel(*bel, bc);
        p.cells[port] = *bel;
        p.fixed.insert(port);
    }

    std::vector<BelId> lut_bels, pad_bels;
    for (BelId b : db.all_bels())
        (db.bel_kind(b) == BelKind::PAD ? pad_bels : lut_bels).push_back(b);

    for (const auto &[name, c] : n.cells) {
        if (p.cells.count(name))
            continue;
        if (c.type != "LUTFF" && c.type != "PAD")
            throw UnsatisfiableConstraint("cell '" + name + "' of kind '" + c.type + "' is not placeable");
        const auto &cands = c.type == "PAD" ? pad_bels : lut_bels;
        if (cands.empty())
            throw InsufficientCapacity("device has no bels for cell '" + name + "'");
        auto bc = bound_cell(name, c);
        auto usable = [&](BelId b) { return region_ok(cons, name, b) && check_bel_validity(db, st, bc, b); };
        std::optional<BelId> chosen;
        for (size_t tries = 0; tries < 4 * cands.size() + 16 && !chosen; tries++) {
            BelId b = cands[size_t(rng() % cands.size())];
            if (usable(b))
                chosen = b;
        }
        if (!chosen)
            for (BelId b : cands)
                if (usable(b)) {
                    chosen = b;
                    break;
                }
        if (!chosen)
            throw InsufficientCapacity("no free valid bel for cell '" + name + "'");
        st.bind_bel(*chosen, bc);
        p.cells[name] = *chosen;
    }
    p.hpwl_cost = hpwl(db, n, p);
    return p;
}

Placement sa_place(const Netlist &n, const DeviceDB &db, const PlaceConstraints &cons, const SAConfig &cfg,
                   const DelayModel &model)
{
    if (cfg.gamma <= 0 || cfg.gamma >= 1)
        throw InvalidParams("cooling factor must be in (0,1)");
    if (cfg.lambda < 0 || cfg.lambda > 1)
        throw InvalidParams("timing weight must be in [0,1]");

    Placement p = initial_placement(n, db, cons, cfg.seed);
    std::mt19937_64 rng(cfg.seed * 0x9e3779b97f4a7c15ULL + 1);

    std::vector<std::string> movable;
    for (const auto &[name, bel] : p.cells)
        if (!p.fixed.count(name))
            movable.push_back(name);
    auto nets = real_nets(n);
    if (movable.empty() || nets.empty()) {
        p.hpwl_cost = hpwl(db, n, p);
        p.timing_cost = 0;
        return p;
    }

    std::map<std::string, std::vector<size_t>> cell_nets;
    for (size_t i = 0; i < nets.size(); i++)
        for (const auto &pin : nets[i].pins)
            cell_nets[pin.cell].push_back(i);
    for (auto &[cell, v] : cell_nets) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }

    BindingState st;
    for (const auto &[name, bel] : p.cells)
        st.bind_bel(bel, bound_cell(name, n.cells.at(name)));

    std::vector<BelId> lut_bels, pad_bels;
    for (BelId b : db.all_bels())
        (db.bel_kind(b) == BelKind::PAD ? pad_bels : lut_bels).push_back(b);

    std::map<PinKey, double> crit;
    const double lambda = cfg.lambda;

    auto net_cost = [&](size_t ni) -> double {
        const NetPins &np = nets[ni];
        int32_t xmin = INT32_MAX, xmax = INT32_MIN, ymin = INT32_MAX, ymax = INT32_MIN;
        for (const auto &pin : np.pins) {
            BelId b = p.cells.at(pin.cell);
            xmin = std::min<int32_t>(xmin, b.x);
            xmax = std::max<int32_t>(xmax, b.x);
            ymin = std::min<int32_t>(ymin, b.y);
            ymax = std::max<int32_t>(ymax, b.y);
        }
        double cost = (1.0 - lambda) * (double(xmax - xmin) + double(ymax - ymin));
        if (lambda > 0 && !crit.empty()) {
            const PortRef &drv = np.pins[0];
            WireId src = db.bel_pin_wire(p.cells.at(drv.cell), drv.port);
            double tm = 0;
            for (size_t i = 1; i < np.pins.size(); i++) {
                auto cit = crit.find({np.pins[i].cell, np.pins[i].port});
                if (cit == crit.end() || cit->second <= 0)
                    continue;
                WireId dst = db.bel_pin_wire(p.cells.at(np.pins[i].cell), np.pins[i].port);
                tm += cit->second * double(estimate_delay(db, src, dst, model));
            }
            cost += lambda * tm;
        }
        return cost;
    };

    std::vector<double> ncost(nets.size());
    double total = 0;
    auto recompute_all = [&]() {
        total = 0;
        for (size_t i = 0; i < nets.size(); i++) {
            ncost[i] = net_cost(i);
            total += ncost[i];
        }
    };
    auto refresh_criticality = [&]() {
        if (lambda <= 0)
            return;
        crit = sta(db, n, p, nullptr, model).criticality;
        recompute_all();
    };
    recompute_all();

    // One proposed move; returns (proposed, delta) and applies it when
    // `apply` is set and the Metropolis rule accepts.
    auto attempt = [&](double T, double range, bool apply, bool &accepted) -> std::optional<double> {
        accepted = false;
        const std::string &cname = movable[size_t(rng() % movable.size())];
        const Cell &cc = n.cells.at(cname);
        BelId cur = p.cells.at(cname);
        const auto &cands = cc.type == "PAD" ? pad_bels : lut_bels;
        std::optional<BelId> target;
        for (int tries = 0; tries < 24 && !target; tries++) {
            BelId b = cands[size_t(rng() % cands.size())];
            if (b == cur)
                continue;
            if (std::abs(int(b.x) - int(cur.x)) > range || std::abs(int(b.y) - int(cur.y)) > range)
                continue;
            target = b;
        }
        if (!target)
            return std::nullopt;
        const BindingState::BoundCell *occ = st.bel_cell(*target);
        std::string oname;
        if (occ) {
            oname = occ->name;
            if (p.fixed.count(oname))
                return std::nullopt;
        }
        auto bc_c = bound_cell(cname, cc);
        st.unbind_bel(cur);
        if (occ)
            st.unbind_bel(*target);
        bool ok = region_ok(cons, cname, *target) && check_bel_validity(db, st, bc_c, *target);
        if (ok && occ) {
            auto bc_o = bound_cell(oname, n.cells.at(oname));
            st.bind_bel(*target, bc_c); // so the swap partner sees the new occupancy
            ok = region_ok(cons, oname, cur) && check_bel_validity(db, st, bc_o, cur);
            st.unbind_bel(*target);
        }
        auto rebind_old = [&]() {
            st.bind_bel(cur, bc_c);
            if (occ)
                st.bind_bel(*target, bound_cell(oname, n.cells.at(oname)));
        };
        if (!ok) {
            rebind_old();
            return std::nullopt;
        }
        // Tentative placement update for cost evaluation.
        p.cells[cname] = *target;
        if (occ)
            p.cells[oname] = cur;
        std::set<size_t> affected(cell_nets[cname].begin(), cell_nets[cname].end());
        if (occ)
            affected.insert(cell_nets[oname].begin(), cell_nets[oname].end());
        double delta = 0;
        std::vector<std::pair<size_t, double>> updated;
        for (size_t ni : affected) {
            double c = net_cost(ni);
            delta += c - ncost[ni];
            updated.push_back({ni, c});
        }
        bool take = apply && (delta <= 0 || rnd01(rng) < std::exp(-delta / std::max(T, 1e-12)));
        if (take) {
            st.bind_bel(*target, bc_c);
            if (occ)
                st.bind_bel(cur, bound_cell(oname, n.cells.at(oname)));
            for (const auto &[ni, c] : updated) {
                total += c - ncost[ni];
                ncost[ni] = c;
            }
            accepted = true;
        } else {
            p.cells[cname] = cur;
            if (occ)
                p.cells[oname] = *target;
            rebind_old();
        }
        return delta;
    };

    double range = double(std::max(db.width(), db.height()));
    const double range_max = range;

    refresh_criticality();

    double T;
    if (cfg.initial_temp) {
        T = *cfg.initial_temp;
    } else {
        std::vector<double> deltas;
        bool acc;
        for (int i = 0; i < 100; i++) {
            auto d = attempt(0, range, false, acc);
            if (d)
                deltas.push_back(*d);
        }
        double mean = 0, var = 0;
        for (double d : deltas)
            mean += d;
        mean /= std::max<size_t>(deltas.size(), 1);
        for (double d : deltas)
            var += (d - mean) * (d - mean);
        var /= std::max<size_t>(deltas.size(), 1);
        T = 20.0 * std::sqrt(var);
        if (T <= 0)
            T = 1.0;
    }

    Placement best = p;
    double best_total = total;
    int unimproved = 0;
    const size_t moves_per_level = size_t(cfg.moves_per_cell) * movable.size();
    for (int level = 0; level < 2000; level++) {
        double best_before = best_total;
        size_t accepted_count = 0, proposed = 0;
        for (size_t m = 0; m < moves_per_level; m++) {
            bool acc;
            auto d = attempt(T, range, true, acc);
            if (d)
                proposed++;
            if (acc) {
                accepted_count++;
                if (total < best_total - 1e-9) {
                    best_total = total;
                    best = p;
                }
            }
        }
        double acc_rate = proposed ? double(accepted_count) / double(proposed) : 0.0;
        range = std::clamp(range * (acc_rate < 0.44 ? 0.9 : 1.1), 1.0, range_max);
        if (best_total < best_before - 1e-9)
            unimproved = 0;
        else
            unimproved++;
        T *= cfg.gamma;
        if (T < 0.005 * total / double(nets.size()) || unimproved >= 5)
            break;
        refresh_criticality();
    }

    best.seed = cfg.seed;
    best.hpwl_cost = hpwl(db, n, best);
    best.timing_cost = lambda > 0 ? timing_cost(db, n, best, model, crit) : 0.0;
    return best;
}

std::vector<double> b2b_solve_axis(int32_t num_vars, const std::vector<std::vector<B2BPin>> &nets,
                                   const std::vector<double> &init, double tolerance, int32_t max_iters)
{
    if (init.size() != size_t(num_vars))
        throw InvalidParams("b2b initial vector size mismatch");
    auto pin_pos = [&](const B2BPin &p) { return p.var >= 0 ? init[size_t(p.var)] : p.pos; };

    // Springs of the quadratic: (i, j, w) with j possibly fixed (var -1).
    struct Spring
    {
        int32_t a, b; // variable indices, -1 = fixed
        double pa, pb;
        double w;
    };
    std::vector<Spring> springs;
    std::vector<int32_t> comp(static_cast<size_t>(num_vars));
    std::iota(comp.begin(), comp.end(), 0);
    std::function<int32_t(int32_t)> find = [&](int32_t v) {
        while (comp[size_t(v)] != v) {
            comp[size_t(v)] = comp[size_t(comp[size_t(v)])];
            v = comp[size_t(v)];
        }
        return v;
    };
    std::vector<bool> anchored(size_t(num_vars), false);

    for (const auto &net : nets) {
        if (net.size() < 2)
            continue;
        size_t lo = 0, hi = 0;
        for (size_t i = 1; i < net.size(); i++) {
            if (pin_pos(net[i]) < pin_pos(net[lo]))
                lo = i;
            if (pin_pos(net[i]) > pin_pos(net[hi]))
                hi = i;
        }
        double p1 = double(net.size()) - 1.0;
        auto add = [&](const B2BPin &u, const B2BPin &v) {
            if (u.var < 0 && v.var < 0)
                return;
            if (u.var >= 0 && v.var >= 0 && u.var == v.var)
                return;
            double w = 1.0 / (p1 * std::abs(pin_pos(u) - pin_pos(v)) + B2B_EPS);
            w = std::clamp(w, B2B_WMIN, B2B_WMAX);
            springs.push_back({u.var, v.var, u.var < 0 ? u.pos : 0, v.var < 0 ? v.pos : 0, w});
            if (u.var >= 0 && v.var >= 0)
                comp[size_t(find(u.var))] = find(v.var);
            else
                anchored[size_t(u.var >= 0 ? u.var : v.var)] = true;
        };
        // One spring between the bounds, plus two per inner pin (2p-3 total).
        for (size_t i = 0; i < net.size(); i++) {
            if (i != lo)
                add(net[i], net[lo]);
            if (i != hi && i != lo)
                add(net[i], net[hi]);
        }
    }

    // Propagate anchoring through components and reject unanchored ones.
    std::vector<bool> comp_anchored(size_t(num_vars), false);
    for (int32_t v = 0; v < num_vars; v++)
        if (anchored[size_t(v)])
            comp_anchored[size_t(find(v))] = true;
    std::vector<bool> in_system(size_t(num_vars), false);
    for (const auto &s : springs) {
        if (s.a >= 0)
            in_system[size_t(s.a)] = true;
        if (s.b >= 0)
            in_system[size_t(s.b)] = true;
    }
    for (int32_t v = 0; v < num_vars; v++)
        if (in_system[size_t(v)] && !comp_anchored[size_t(find(v))])
            throw UnanchoredComponent("variable " + std::to_string(v) + " has no fixed pin in its component");

    // Normal equations A x = b; A applied on the fly from the spring list.
    std::vector<double> diag(size_t(num_vars), 0.0), b(size_t(num_vars), 0.0);
    for (const auto &s : springs) {
        if (s.a >= 0)
            diag[size_t(s.a)] += s.w;
        if (s.b >= 0)
            diag[size_t(s.b)] += s.w;
        if (s.a >= 0 && s.b < 0)
            b[size_t(s.a)] += s.w * s.pb;
        if (s.b >= 0 && s.a < 0)
            b[size_t(s.b)] += s.w * s.pa;
    }
    auto apply_A = [&](const std::vector<double> &x, std::vector<double> &out) {
        for (int32_t v = 0; v < num_vars; v++)
            out[size_t(v)] = diag[size_t(v)] * x[size_t(v)];
        for (const auto &s : springs)
            if (s.a >= 0 && s.b >= 0) {
                out[size_t(s.a)] -= s.w * x[size_t(s.b)];
                out[size_t(s.b)] -= s.w * x[size_t(s.a)];
            }
    };

    std::vector<double> x = init;
    std::vector<double> r(static_cast<size_t>(num_vars));
    std::vector<double> d(static_cast<size_t>(num_vars));
    std::vector<double> q(static_cast<size_t>(num_vars));
    apply_A(x, r);
    for (int32_t v = 0; v < num_vars; v++)
        r[size_t(v)] = b[size_t(v)] - r[size_t(v)];
    // Keep springless variables exactly at their initial value.
    for (int32_t v = 0; v < num_vars; v++)
        if (diag[size_t(v)] == 0)
            r[size_t(v)] = 0;
    d = r;
    double rr = std::inner_product(r.begin(), r.end(), r.begin(), 0.0);
    for (int32_t it = 0; it < max_iters && rr > tolerance * tolerance; it++) {
        apply_A(d, q);
        for (int32_t v = 0; v < num_vars; v++)
            if (diag[size_t(v)] == 0)
                q[size_t(v)] = 0;
        double dq = std::inner_product(d.begin(), d.end(), q.begin(), 0.0);
        if (dq <= 0)
            break;
        double alpha = rr / dq;
        for (int32_t v = 0; v < num_vars; v++) {
            x[size_t(v)] += alpha * d[size_t(v)];
            r[size_t(v)] -= alpha * q[size_t(v)];
        }
        double rr2 = std::inner_product(r.begin(), r.end(), r.begin(), 0.0);
        double beta = rr2 / rr;
        rr = rr2;
        for (int32_t v = 0; v < num_vars; v++)
            d[size_t(v)] = r[size_t(v)] + beta * d[size_t(v)];
    }
    return x;
}

namespace {

// Recursive bi-partition spreading of movable cells over the logic area.
void spread_region(const DeviceDB &db, std::vector<size_t> &cells, std::vector<double> &px,
                   std::vector<double> &py, Rect rect, int n_per_tile)
{
    int64_t cap = 0;
    for (int32_t y = rect.y0; y <= rect.y1; y++)
        for (int32_t x = rect.x0; x <= rect.x1; x++)
            if (db.tile(x, y).kind == TileKind::LOGIC)
                cap += n_per_tile;
    auto clamp_into = [&]() {
        for (size_t c : cells) {
            px[c] = std::clamp(px[c], double(rect.x0), double(rect.x1));
            py[c] = std::clamp(py[c], double(rect.y0), double(rect.y1));
        }
    };
    bool single = rect.x0 == rect.x1 && rect.y0 == rect.y1;
    if (int64_t(cells.size()) <= cap || single) {
        clamp_into();
        return;
    }
    bool split_x = (rect.x1 - rect.x0) >= (rect.y1 - rect.y0);
    if (split_x && rect.x0 == rect.x1)
        split_x = false;
    if (!split_x && rect.y0 == rect.y1)
        split_x = true;
    Rect a = rect, b = rect;
    if (split_x) {
        int32_t mid = (rect.x0 + rect.x1) / 2;
        a.x1 = mid;
        b.x0 = mid + 1;
        std::sort(cells.begin(), cells.end(), [&](size_t u, size_t v) {
            return px[u] != px[v] ? px[u] < px[v] : u < v;
        });
    } else {
        int32_t mid = (rect.y0 + rect.y1) / 2;
        a.y1 = mid;
        b.y0 = mid + 1;
        std::sort(cells.begin(), cells.end(), [&](size_t u, size_t v) {
            return py[u] != py[v] ? py[u] < py[v] : u < v;
        });
    }
    auto capacity = [&](const Rect &r) {
        int64_t c = 0;
        for (int32_t y = r.y0; y <= r.y1; y++)
            for (int32_t x = r.x0; x <= r.x1; x++)
                if (db.tile(x, y).kind == TileKind::LOGIC)
                    c += n_per_tile;
        return c;
    };
    int64_t ca = capacity(a), cb = capacity(b);
    if (ca + cb == 0) {
        clamp_into();
        return;
    }
    size_t k = size_t(std::llround(double(cells.size()) * double(ca) / double(ca + cb)));
    k = std::min(std::min(k, size_t(ca)), cells.size());
    if (cells.size() - k > size_t(cb))
        k = cells.size() - size_t(cb);
    std::vector<size_t> left(cells.begin(), cells.begin() + long(k));
    std::vector<size_t> right(cells.begin() + long(k), cells.end());
    spread_region(db, left, px, py, a, n_per_tile);
    spread_region(db, right, px, py, b, n_per_tile);
    cells.clear();
    cells.insert(cells.end(), left.begin(), left.end());
    cells.insert(cells.end(), right.begin(), right.end());
}

} // namespace

Placement heap_place(const Netlist &n, const DeviceDB &db, const PlaceConstraints &cons, const AnalyticConfig &cfg,
                     const DelayModel &model)
{
    (void)model;
    if (cfg.tolerance <= 0)
        throw InvalidParams("solver tolerance must be positive");
    Placement init = initial_placement(n, db, cons, cfg.seed);

    // Anchors: constrained cells plus all pads (pinned where the seed
    // placement put them); designs without pads anchor their first cell.
    std::set<std::string> anchored = init.fixed;
    for (const auto &[name, c] : n.cells)
        if (c.type == "PAD")
            anchored.insert(name);
    std::vector<std::string> movable;
    for (const auto &[name, c] : n.cells)
        if (!anchored.count(name) && init.cells.count(name))
            movable.push_back(name);
    if (anchored.empty() && !movable.empty()) {
        anchored.insert(movable.front());
        movable.erase(movable.begin());
    }
    std::map<std::string, int32_t> var_of;
    for (size_t i = 0; i < movable.size(); i++)
        var_of[movable[i]] = int32_t(i);

    auto nets = real_nets(n);
    std::vector<double> px(movable.size(), (db.width() - 1) / 2.0);
    std::vector<double> py(movable.size(), (db.height() - 1) / 2.0);

    // Pre-anchor components with no fixed pin at their seed positions.
    {
        std::vector<int32_t> comp(movable.size());
        std::iota(comp.begin(), comp.end(), 0);
        std::function<int32_t(int32_t)> find = [&](int32_t v) {
            while (comp[size_t(v)] != v) {
                comp[size_t(v)] = comp[size_t(comp[size_t(v)])];
                v = comp[size_t(v)];
            }
            return v;
        };
        std::vector<bool> comp_anchor(movable.size(), false), in_net(movable.size(), false);
        for (const auto &np : nets) {
            int32_t first = -1;
            bool has_fixed = false;
            for (const auto &pin : np.pins) {
                auto it = var_of.find(pin.cell);
                if (it == var_of.end()) {
                    has_fixed = true;
                    continue;
                }
                in_net[size_t(it->second)] = true;
                if (first < 0)
                    first = it->second;
                else
                    comp[size_t(find(it->second))] = find(first);
            }
            if (first >= 0 && has_fixed)
                comp_anchor[size_t(find(first))] = true;
        }
        std::map<int32_t, bool> root_anchor;
        for (size_t v = 0; v < movable.size(); v++)
            if (comp_anchor[v])
                root_anchor[find(int32_t(v))] = true;
        std::set<int32_t> forced;
        for (size_t v = 0; v < movable.size(); v++) {
            if (!in_net[v])
                continue;
            int32_t root = find(int32_t(v));
            if (!root_anchor.count(root) && !forced.count(root)) {
                forced.insert(root);
                anchored.insert(movable[v]); // first cell of the component
            }
        }
        if (!forced.empty()) {
            std::vector<std::string> still;
            for (const auto &name : movable)
                if (!anchored.count(name))
                    still.push_back(name);
            movable = still;
            var_of.clear();
            for (size_t i = 0; i < movable.size(); i++)
                var_of[movable[i]] = int32_t(i);
            px.assign(movable.size(), (db.width() - 1) / 2.0);
            py.assign(movable.size(), (db.height() - 1) / 2.0);
        }
    }

    auto axis_nets = [&](bool x_axis) {
        std::vector<std::vector<B2BPin>> out;
        for (const auto &np : nets) {
            std::vector<B2BPin> pins;
            for (const auto &pin : np.pins) {
                auto it = var_of.find(pin.cell);
                if (it != var_of.end()) {
                    pins.push_back({it->second, 0});
                } else {
                    BelId b = init.cells.at(pin.cell);
                    pins.push_back({-1, double(x_axis ? b.x : b.y)});
                }
            }
            if (pins.size() >= 2)
                out.push_back(std::move(pins));
        }
        return out;
    };

    Placement best = init;
    double best_cost = hpwl(db, n, init);

    for (int iter = 0; iter < std::max(cfg.spread_iters, 1); iter++) {
        px = b2b_solve_axis(int32_t(movable.size()), axis_nets(true), px, cfg.tolerance, cfg.max_solver_iters);
        py = b2b_solve_axis(int32_t(movable.size()), axis_nets(false), py, cfg.tolerance, cfg.max_solver_iters);

        // Spread LUTFF cells over the logic area.
        std::vector<size_t> lut_cells;
        for (size_t i = 0; i < movable.size(); i++)
            if (n.cells.at(movable[i]).type != "PAD")
                lut_cells.push_back(i);
        Rect logic{1, 1, db.width() - 2, db.height() - 2};
        int n_per_tile = int(db.tile(1, 1).bels.size());
        spread_region(db, lut_cells, px, py, logic, n_per_tile);

        // Legalize: nearest free valid bel by increasing distance.
        Placement cand;
        cand.seed = cfg.seed;
        cand.fixed = init.fixed;
        BindingState st;
        for (const auto &name : anchored) {
            if (!init.cells.count(name))
                continue;
            BelId b = init.cells.at(name);
            st.bind_bel(b, bound_cell(name, n.cells.at(name)));
            cand.cells[name] = b;
        }
        std::vector<BelId> lut_bels, pad_bels;
        for (BelId b : db.all_bels())
            (db.bel_kind(b) == BelKind::PAD ? pad_bels : lut_bels).push_back(b);
        bool failed = false;
        for (size_t i = 0; i < movable.size() && !failed; i++) {
            const std::string &name = movable[i];
            const Cell &c = n.cells.at(name);
            const auto &cands = c.type == "PAD" ? pad_bels : lut_bels;
            auto bc = bound_cell(name, c);
            std::vector<std::pair<double, BelId>> ranked;
            for (BelId b : cands)
                ranked.push_back({std::abs(double(b.x) - px[i]) + std::abs(double(b.y) - py[i]), b});
            std::stable_sort(ranked.begin(), ranked.end(),
                             [](const auto &a, const auto &b) { return a.first < b.first; });
            bool placed = false;
            for (const auto &[dist, b] : ranked) {
                if (dist > double(cfg.legalize_radius))
                    break;
                if (region_ok(cons, name, b) && check_bel_validity(db, st, bc, b)) {
                    st.bind_bel(b, bc);
                    cand.cells[name] = b;
                    placed = true;
                    break;
                }
            }
            if (!placed)
                failed = true;
        }
        if (failed)
            continue;
        double cost = hpwl(db, n, cand);
        if (cost < best_cost || iter == 0) {
            best_cost = cost;
            best = cand;
        }
        // Next round solves from the legalized coordinates.
        for (size_t i = 0; i < movable.size(); i++) {
            BelId b = cand.cells.at(movable[i]);
            px[i] = b.x;
            py[i] = b.y;
        }
    }

    best.seed = cfg.seed;
    best.hpwl_cost = hpwl(db, n, best);
    best.timing_cost = 0;
    return best;
}

std::vector<std::string> audit_placement(const DeviceDB &db, const Netlist &n, const Placement &p,
                                         const PlaceConstraints &cons)
{
    std::vector<std::string> diags;
    std::map<BelId, std::string> used;
    for (const auto &[name, c] : n.cells) {
        if (c.type != "LUTFF" && c.type != "PAD")
            continue;
        auto it = p.cells.find(name);
        if (it == p.cells.end()) {
            diags.push_back("cell '" + name + "' is not placed");
            continue;
        }
        BelId b = it->second;
        if (!db.bel_exists(b)) {
            diags.push_back("cell '" + name + "' placed on a nonexistent bel");
            continue;
        }
        auto [pos, fresh] = used.emplace(b, name);
        if (!fresh)
            diags.push_back("bel " + db.bel_name(b) + " hosts both '" + pos->second + "' and '" + name + "'");
        BelKind want = c.type == "PAD" ? BelKind::PAD : BelKind::LUTFF;
        if (db.bel_kind(b) != want)
            diags.push_back("cell '" + name + "' placed on a bel of the wrong kind");
        if (!region_ok(cons, name, b))
            diags.push_back("cell '" + name + "' violates its region constraint");
    }
    for (const auto &[port, padname] : cons.set_io) {
        auto it = p.cells.find(port);
        auto bel = db.pad_by_name(padname);
        if (it == p.cells.end() || !bel || !(it->second == *bel))
            diags.push_back("constraint 'set_io " + port + " " + padname + "' not honored");
    }
    // Validity including the shared-clock tile rule, checked one binding at
    // a time against all the others.
    BindingState st;
    for (const auto &[name, c] : n.cells) {
        auto it = p.cells.find(name);
        if (it != p.cells.end() && db.bel_exists(it->second) && !st.bel_cell(it->second))
            st.bind_bel(it->second, bound_cell(name, c));
    }
    for (const auto &[name, c] : n.cells) {
        auto it = p.cells.find(name);
        if (it == p.cells.end() || !db.bel_exists(it->second))
            continue;
        if (!st.bel_cell(it->second))
            continue;
        st.unbind_bel(it->second);
        if (!check_bel_validity(db, st, bound_cell(name, c), it->second))
            diags.push_back("binding of '" + name + "' fails validity checks");
        st.bind_bel(it->second, bound_cell(name, c));
    }
    return diags;
}

} // namespace ipnr
