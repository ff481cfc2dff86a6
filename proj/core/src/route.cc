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

#include "ipnr/route.hh"

#include <algorithm>
#include <queue>

#include "ipnr/pack.hh"

namespace ipnr {

namespace {

// Nets the router is responsible for: a placed cell driver pin plus at
// least one placed cell sink pin; clock nets ride the global network.
struct RoutableNet
{
    int32_t net;
    PortRef driver;
    std::vector<PortRef> sinks;
};

std::vector<RoutableNet> routable_nets(const Netlist &n)
{
    auto table = n.net_table();
    auto clkv = clock_nets(n);
    std::set<int32_t> clk(clkv.begin(), clkv.end());
    std::vector<RoutableNet> out;
    for (int32_t i = 0; i < n.num_nets; i++) {
        if (clk.count(i))
            continue;
        const NetInfo &info = table[size_t(i)];
        if (!info.driver || info.driver->cell.empty())
            continue;
        RoutableNet rn;
        rn.net = i;
        rn.driver = *info.driver;
        for (const auto &s : info.sinks)
            if (!s.cell.empty())
                rn.sinks.push_back(s);
        if (!rn.sinks.empty())
            out.push_back(std::move(rn));
    }
    return out;
}

std::set<WireId> tree_wires(const RouteTree &t, const DeviceDB &db)
{
    std::set<WireId> w;
    w.insert(t.source);
    for (const auto &[sink, pips] : t.sinks)
        for (PipId p : pips)
            w.insert(db.pip_dst(p));
    return w;
}

} // namespace

std::optional<AstarResult> astar_search(const DeviceDB &db, const std::vector<WireId> &sources, WireId sink,
                                        const CongestionState &congestion, double criticality,
                                        const DelayModel &model)
{
    const int64_t W = db.wire_count();
    const int64_t sink_flat = db.wire_flat(sink);
    const double crit = std::clamp(criticality, 0.0, 1.0);

    std::vector<double> cost(size_t(W), std::numeric_limits<double>::infinity());
    std::vector<int64_t> delay(size_t(W), 0);
    std::vector<PipId> prev_pip(static_cast<size_t>(W));
    std::vector<int64_t> prev_wire(size_t(W), -1);
    std::vector<uint8_t> done(size_t(W), 0), is_source(size_t(W), 0);

    using QEntry = std::pair<double, int64_t>; // (f, flat wire)
    std::priority_queue<QEntry, std::vector<QEntry>, std::greater<QEntry>> pq;
    for (WireId s : sources) {
        int64_t f = db.wire_flat(s);
        cost[size_t(f)] = 0.0;
        is_source[size_t(f)] = 1;
        pq.push({double(estimate_delay(db, s, sink, model)), f});
    }

    while (!pq.empty()) {
        auto [f, u] = pq.top();
        pq.pop();
        if (done[size_t(u)])
            continue;
        done[size_t(u)] = 1;
        if (u == sink_flat)
            break;
        WireId uw = db.wire_unflat(u);
        for (const auto &adj : db.downhill(uw)) {
            int64_t v = db.wire_flat(adj.wire);
            if (done[size_t(v)] || is_source[size_t(v)])
                continue;
            if (!congestion.blocked.empty() && congestion.blocked[size_t(v)])
                continue;
            double base = double(model.pip_delay(db.pip_class(adj.pip)));
            double step = crit * base + (1.0 - crit) * base * congestion.multiplier(v);
            double nc = cost[size_t(u)] + step;
            if (nc < cost[size_t(v)]) {
                cost[size_t(v)] = nc;
                delay[size_t(v)] = delay[size_t(u)] + int64_t(model.pip_delay(db.pip_class(adj.pip)));
                prev_pip[size_t(v)] = adj.pip;
                prev_wire[size_t(v)] = u;
                pq.push({nc + double(estimate_delay(db, adj.wire, sink, model)), v});
            }
        }
    }

    if (!done[size_t(sink_flat)])
        return std::nullopt;
    AstarResult res;
    res.delay_ps = delay[size_t(sink_flat)];
    res.cost = cost[size_t(sink_flat)];
    int64_t cur = sink_flat;
    while (prev_wire[size_t(cur)] >= 0) {
        res.pips.push_back(prev_pip[size_t(cur)]);
        cur = prev_wire[size_t(cur)];
    }
    std::reverse(res.pips.begin(), res.pips.end());
    res.entry = db.wire_unflat(cur);
    return res;
}

RouteTree route_net_astar(const DeviceDB &db, const Netlist &n, int32_t net, const Placement &placement,
                          const CongestionState &congestion, const std::map<PinKey, double> &criticality,
                          const DelayModel &model, std::vector<int64_t> *sink_delays)
{
    auto table = n.net_table();
    if (net < 0 || net >= n.num_nets)
        throw Unroutable("net " + std::to_string(net) + " does not exist");
    const NetInfo &info = table[size_t(net)];
    if (!info.driver || info.driver->cell.empty())
        throw Unroutable("net " + std::to_string(net) + " has no placed driver pin");

    RouteTree tree;
    tree.net = net;
    tree.source = cell_pin_wire(db, placement, info.driver->cell, info.driver->port);

    struct SinkRef
    {
        PortRef pin;
        WireId wire;
        double crit;
    };
    std::vector<SinkRef> sinks;
    for (const auto &s : info.sinks) {
        if (s.cell.empty())
            continue;
        auto cit = criticality.find({s.cell, s.port});
        sinks.push_back({s, cell_pin_wire(db, placement, s.cell, s.port),
                         cit == criticality.end() ? 0.0 : cit->second});
    }
    std::stable_sort(sinks.begin(), sinks.end(), [](const SinkRef &a, const SinkRef &b) {
        return a.crit != b.crit ? a.crit > b.crit : a.pin < b.pin;
    });

    std::vector<WireId> reached{tree.source};
    std::map<WireId, std::vector<PipId>> walk_of{{tree.source, {}}};
    std::map<WireId, int64_t> delay_of{{tree.source, 0}};

    if (sink_delays)
        sink_delays->clear();
    for (const auto &s : sinks) {
        if (walk_of.count(s.wire)) { // already on the tree
            tree.sinks.emplace_back(s.wire, walk_of.at(s.wire));
            if (sink_delays)
                sink_delays->push_back(delay_of.at(s.wire));
            continue;
        }
        auto res = astar_search(db, reached, s.wire, congestion, s.crit, model);
        if (!res)
            throw Unroutable("net " + std::to_string(net) + ": no path to sink pin " + s.pin.cell + "." +
                             s.pin.port);
        std::vector<PipId> walk = walk_of.at(res->entry);
        int64_t d = delay_of.at(res->entry);
        for (PipId p : res->pips) {
            walk.push_back(p);
            d += model.pip_delay(db.pip_class(p));
            WireId w = db.pip_dst(p);
            if (!walk_of.count(w)) {
                walk_of.emplace(w, walk);
                delay_of.emplace(w, d);
                reached.push_back(w);
            }
        }
        tree.sinks.emplace_back(s.wire, walk_of.at(s.wire));
        if (sink_delays)
            sink_delays->push_back(delay_of.at(s.wire));
    }
    return tree;
}

RouteResult route_all(const DeviceDB &db, const Netlist &n, const Placement &placement, const RouteConfig &cfg)
{
    RouteResult result;
    auto nets = routable_nets(n);
    if (nets.empty()) {
        result.iterations = 1;
        return result;
    }

    std::map<PinKey, double> crit = sta(db, n, placement, nullptr, cfg.model).criticality;
    for (auto &[pin, c] : crit)
        c = std::min(c, cfg.max_criticality);

    CongestionState cong(db.wire_count());
    cong.present_factor = cfg.present_factor;
    cong.history_increment = cfg.history_increment;

    std::map<int32_t, std::set<WireId>> wires_of;
    std::set<int32_t> need;
    for (const auto &rn : nets)
        need.insert(rn.net);
    std::map<int32_t, const RoutableNet *> by_id;
    for (const auto &rn : nets)
        by_id[rn.net] = &rn;

    std::set<int64_t> prev_overused;
    int32_t stagnant = 0;
    for (int32_t iter = 1; iter <= cfg.max_iterations; iter++) {
        cong.iteration = iter;
        // Rip all nets to be rerouted first, then route them in order:
        // a net being rerouted must not be blocked by the stale binding of
        // another net in the same batch.
        for (int32_t net : need) {
            auto wit = wires_of.find(net);
            if (wit != wires_of.end()) {
                for (const WireId &w : wit->second)
                    cong.present[size_t(db.wire_flat(w))]--;
                wires_of.erase(wit);
                result.routing.nets.erase(net);
            }
        }
        for (int32_t net : need) {
            std::vector<int64_t> sink_delays;
            RouteTree tree = route_net_astar(db, n, net, placement, cong, crit, cfg.model, &sink_delays);
            std::set<WireId> tw = tree_wires(tree, db);
            for (const WireId &w : tw)
                cong.present[size_t(db.wire_flat(w))]++;
            size_t si = 0;
            for (const auto &[sw, pips] : tree.sinks)
                result.sink_delay_ps[{net, sw}] = sink_delays[si++];
            wires_of[net] = std::move(tw);
            result.routing.nets[net] = std::move(tree);
        }

        std::set<int64_t> overused;
        for (int64_t w = 0; w < db.wire_count(); w++)
            if (cong.present[size_t(w)] > 1)
                overused.insert(w);
        if (overused.empty()) {
            result.iterations = iter;
            return result;
        }
        for (int64_t w : overused)
            cong.history[size_t(w)] += cfg.history_increment;
        stagnant = overused == prev_overused ? stagnant + 1 : 0;
        prev_overused = std::move(overused);
        need.clear();
        if (stagnant >= 3) {
            // The conflict is pinned in place by nets that are not overused
            // themselves; rip everything up so they can make way.
            for (const auto &rn : nets)
                need.insert(rn.net);
        } else {
            for (const auto &[net, tw] : wires_of)
                for (const WireId &w : tw)
                    if (prev_overused.count(db.wire_flat(w))) {
                        need.insert(net);
                        break;
                    }
        }
    }

    int64_t overuse = 0;
    for (int64_t w = 0; w < db.wire_count(); w++)
        if (cong.present[size_t(w)] > 1)
            overuse++;
    throw RoutingFailed("congestion unresolved after " + std::to_string(cfg.max_iterations) + " iterations (" +
                            std::to_string(overuse) + " overused wires)",
                        cfg.max_iterations, overuse);
}

std::vector<std::string> audit_routing(const DeviceDB &db, const Netlist &n, const Placement &placement,
                                       const Routing &r)
{
    std::vector<std::string> diags;
    std::map<WireId, int32_t> owner;

    for (const auto &rn : routable_nets(n)) {
        auto it = r.nets.find(rn.net);
        if (it == r.nets.end()) {
            diags.push_back("net " + std::to_string(rn.net) + " has no route");
            continue;
        }
        const RouteTree &t = it->second;
        if (t.net != rn.net)
            diags.push_back("route tree for net " + std::to_string(rn.net) + " is mislabeled");
        WireId drv = cell_pin_wire(db, placement, rn.driver.cell, rn.driver.port);
        if (!(t.source == drv))
            diags.push_back("net " + std::to_string(rn.net) + " is not rooted at its driver wire");

        std::map<WireId, PipId> incoming;
        for (const auto &[sink, pips] : t.sinks) {
            WireId cur = t.source;
            bool broken = false;
            for (PipId p : pips) {
                if (!db.pip_exists(p)) {
                    diags.push_back("net " + std::to_string(rn.net) + " uses a nonexistent pip");
                    broken = true;
                    break;
                }
                if (!(db.pip_src(p) == cur)) {
                    diags.push_back("net " + std::to_string(rn.net) + " has a discontinuous pip walk");
                    broken = true;
                    break;
                }
                cur = db.pip_dst(p);
                auto [pos, fresh] = incoming.emplace(cur, p);
                if (!fresh && !(pos->second == p)) {
                    diags.push_back("net " + std::to_string(rn.net) + " reaches wire " + db.wire_name(cur) +
                                    " through two different pips (not a tree)");
                    broken = true;
                    break;
                }
            }
            if (!broken && !(cur == sink))
                diags.push_back("net " + std::to_string(rn.net) + " pip walk does not end at its sink wire");
        }

        std::set<WireId> covered;
        for (const auto &[sink, pips] : t.sinks)
            covered.insert(sink);
        for (const auto &s : rn.sinks) {
            WireId sw = cell_pin_wire(db, placement, s.cell, s.port);
            if (!covered.count(sw))
                diags.push_back("net " + std::to_string(rn.net) + " leaves sink pin " + s.cell + "." + s.port +
                                " unrouted");
        }

        for (const WireId &w : tree_wires(t, db)) {
            auto [pos, fresh] = owner.emplace(w, rn.net);
            if (!fresh && pos->second != rn.net)
                diags.push_back("wire " + db.wire_name(w) + " is shared by nets " +
                                std::to_string(pos->second) + " and " + std::to_string(rn.net));
        }
    }
    return diags;
}

} // namespace ipnr
