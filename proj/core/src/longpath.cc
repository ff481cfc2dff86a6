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

#include "ipnr/longpath.hh"

#include "ipnr/techmap.hh"

#include <algorithm>
#include <chrono>
#include <random>
#include <set>

namespace ipnr {

RoutingGraph build_routing_graph(const DeviceDB &db, const std::string &in_pad, const std::string &out_pad,
                                 const DelayModel &model)
{
    auto in_bel = db.pad_by_name(in_pad);
    auto out_bel = db.pad_by_name(out_pad);
    if (!in_bel)
        throw BadPad("unknown pad '" + in_pad + "'");
    if (!out_bel)
        throw BadPad("unknown pad '" + out_pad + "'");
    if (*in_bel == *out_bel)
        throw BadPad("input and output pads must differ");

    WireId source_wire = db.bel_pin_wire(*in_bel, "PADOUT");
    WireId sink_wire = db.bel_pin_wire(*out_bel, "PADIN");

    RoutingGraph g;
    std::vector<int32_t> node_of(size_t(db.wire_count()), -1);
    for (int64_t f = 0; f < db.wire_count(); f++) {
        WireId w = db.wire_unflat(f);
        WireClass cls = db.wire_class(w);
        if (cls == WireClass::PAD_IN || cls == WireClass::PAD_OUT) {
            // IO resources removed, except the two designated port wires.
            if (!(w == source_wire) && !(w == sink_wire))
                continue;
        }
        node_of[size_t(f)] = g.node_count();
        g.nodes.push_back(w);
    }
    g.adj.resize(g.nodes.size());

    for (int32_t u = 0; u < g.node_count(); u++) {
        for (const auto &adj : db.downhill(g.nodes[size_t(u)])) {
            int32_t v = node_of[size_t(db.wire_flat(adj.wire))];
            if (v < 0)
                continue;
            GraphEdge e;
            e.to = v;
            e.delay_ps = model.pip_delay(db.pip_class(adj.pip));
            e.pip = adj.pip;
            g.adj[size_t(u)].push_back(e);
        }
    }

    const int K = db.params.lut_inputs;
    for (BelId b : db.all_bels()) {
        if (db.bel_kind(b) != BelKind::LUTFF)
            continue;
        int32_t out = node_of[size_t(db.wire_flat(db.bel_pin_wire(b, "Q")))];
        for (int k = 0; k < K; k++) {
            int32_t in = node_of[size_t(db.wire_flat(db.bel_pin_wire(b, "I" + std::to_string(k))))];
            if (in < 0 || out < 0)
                continue;
            GraphEdge e;
            e.to = out;
            e.delay_ps = model.lut_comb_ps;
            e.route_through = true;
            e.bel = b;
            e.input = k;
            g.adj[size_t(in)].push_back(e);
        }
    }

    g.source = node_of[size_t(db.wire_flat(source_wire))];
    g.sink = node_of[size_t(db.wire_flat(sink_wire))];
    return g;
}

namespace {

std::vector<uint8_t> forward_reachable(const RoutingGraph &g, int32_t start)
{
    std::vector<uint8_t> seen(g.nodes.size(), 0);
    std::vector<int32_t> stack{start};
    seen[size_t(start)] = 1;
    while (!stack.empty()) {
        int32_t u = stack.back();
        stack.pop_back();
        for (const auto &e : g.adj[size_t(u)])
            if (!seen[size_t(e.to)]) {
                seen[size_t(e.to)] = 1;
                stack.push_back(e.to);
            }
    }
    return seen;
}

std::vector<uint8_t> backward_reachable(const RoutingGraph &g, int32_t start)
{
    std::vector<std::vector<int32_t>> radj(g.nodes.size());
    for (size_t u = 0; u < g.adj.size(); u++)
        for (const auto &e : g.adj[u])
            radj[size_t(e.to)].push_back(int32_t(u));
    std::vector<uint8_t> seen(g.nodes.size(), 0);
    std::vector<int32_t> stack{start};
    seen[size_t(start)] = 1;
    while (!stack.empty()) {
        int32_t u = stack.back();
        stack.pop_back();
        for (int32_t v : radj[size_t(u)])
            if (!seen[size_t(v)]) {
                seen[size_t(v)] = 1;
                stack.push_back(v);
            }
    }
    return seen;
}

// Iterative Tarjan: assigns a component id to every node.
std::vector<int32_t> tarjan_scc(const RoutingGraph &g, int32_t &num_comps)
{
    const int32_t n = g.node_count();
    std::vector<int32_t> comp(size_t(n), -1), low(size_t(n), 0), disc(size_t(n), -1), stk;
    std::vector<uint8_t> on_stack(size_t(n), 0);
    int32_t timer = 0;
    num_comps = 0;

    struct Frame
    {
        int32_t node;
        size_t edge;
    };
    for (int32_t root = 0; root < n; root++) {
        if (disc[size_t(root)] >= 0)
            continue;
        std::vector<Frame> frames{{root, 0}};
        disc[size_t(root)] = low[size_t(root)] = timer++;
        stk.push_back(root);
        on_stack[size_t(root)] = 1;
        while (!frames.empty()) {
            Frame &f = frames.back();
            if (f.edge < g.adj[size_t(f.node)].size()) {
                int32_t v = g.adj[size_t(f.node)][f.edge++].to;
                if (disc[size_t(v)] < 0) {
                    disc[size_t(v)] = low[size_t(v)] = timer++;
                    stk.push_back(v);
                    on_stack[size_t(v)] = 1;
                    frames.push_back({v, 0});
                } else if (on_stack[size_t(v)]) {
                    low[size_t(f.node)] = std::min(low[size_t(f.node)], disc[size_t(v)]);
                }
            } else {
                int32_t u = f.node;
                frames.pop_back();
                if (!frames.empty())
                    low[size_t(frames.back().node)] = std::min(low[size_t(frames.back().node)], low[size_t(u)]);
                if (low[size_t(u)] == disc[size_t(u)]) {
                    while (true) {
                        int32_t w = stk.back();
                        stk.pop_back();
                        on_stack[size_t(w)] = 0;
                        comp[size_t(w)] = num_comps;
                        if (w == u)
                            break;
                    }
                    num_comps++;
                }
            }
        }
    }
    return comp;
}

} // namespace

std::vector<int32_t> scc_reachable(const RoutingGraph &g, int32_t source, int32_t sink)
{
    auto fwd = forward_reachable(g, source);
    if (!fwd[size_t(sink)])
        throw DisconnectedEndpoints("sink is not reachable from source");
    auto bwd = backward_reachable(g, sink);

    int32_t num_comps = 0;
    auto comp = tarjan_scc(g, num_comps);
    std::vector<int64_t> size_on_walk(size_t(num_comps), 0);
    for (int32_t u = 0; u < g.node_count(); u++)
        if (fwd[size_t(u)] && bwd[size_t(u)])
            size_on_walk[size_t(comp[size_t(u)])]++;
    int32_t best = -1;
    for (int32_t c = 0; c < num_comps; c++)
        if (best < 0 || size_on_walk[size_t(c)] > size_on_walk[size_t(best)])
            best = c;
    std::vector<int32_t> out;
    for (int32_t u = 0; u < g.node_count(); u++)
        if (comp[size_t(u)] == best && fwd[size_t(u)] && bwd[size_t(u)])
            out.push_back(u);
    return out;
}

std::optional<std::vector<int32_t>> dag_longest_path(const RoutingGraph &g, const std::vector<int32_t> &order,
                                                     int32_t source, int32_t sink)
{
    const int32_t n = g.node_count();
    if (order.size() != size_t(n))
        throw InvalidParams("order must be a permutation of the graph nodes");
    if (source == sink)
        return std::vector<int32_t>{source};

    std::vector<int32_t> by_rank(static_cast<size_t>(n));
    for (int32_t u = 0; u < n; u++)
        by_rank[size_t(order[size_t(u)])] = u;

    std::vector<int64_t> edges(size_t(n), -1), delay(size_t(n), 0);
    std::vector<int32_t> parent(size_t(n), -1);
    edges[size_t(source)] = 0;
    for (int32_t r = 0; r < n; r++) {
        int32_t u = by_rank[size_t(r)];
        if (edges[size_t(u)] < 0)
            continue;
        for (const auto &e : g.adj[size_t(u)]) {
            if (order[size_t(e.to)] <= order[size_t(u)])
                continue; // backward or self edge, dropped from the DAG
            int64_t ne = edges[size_t(u)] + 1;
            int64_t nd = delay[size_t(u)] + e.delay_ps;
            if (ne > edges[size_t(e.to)] || (ne == edges[size_t(e.to)] && nd > delay[size_t(e.to)])) {
                edges[size_t(e.to)] = ne;
                delay[size_t(e.to)] = nd;
                parent[size_t(e.to)] = u;
            }
        }
    }
    if (edges[size_t(sink)] < 0)
        return std::nullopt;
    std::vector<int32_t> path;
    for (int32_t u = sink; u >= 0; u = parent[size_t(u)])
        path.push_back(u);
    std::reverse(path.begin(), path.end());
    return path;
}

namespace {

int64_t path_delay(const RoutingGraph &g, const std::vector<int32_t> &path)
{
    int64_t total = 0;
    for (size_t i = 0; i + 1 < path.size(); i++) {
        int64_t best = -1;
        for (const auto &e : g.adj[size_t(path[i])])
            if (e.to == path[i + 1])
                best = std::max<int64_t>(best, e.delay_ps);
        total += best < 0 ? 0 : best;
    }
    return total;
}

// DFS finishing order from the source, neighbors visited in a seeded
// shuffle; reversed it makes every non-back edge a forward edge. Nodes not
// reached from the source are appended at the end.
std::vector<int32_t> dfs_order(const RoutingGraph &g, int32_t source, std::mt19937_64 &rng)
{
    const int32_t n = g.node_count();
    std::vector<int32_t> finish;
    std::vector<uint8_t> seen(size_t(n), 0);
    struct Frame
    {
        int32_t node;
        std::vector<int32_t> succ;
        size_t next = 0;
    };
    auto shuffled_succ = [&](int32_t u) {
        std::vector<int32_t> s;
        for (const auto &e : g.adj[size_t(u)])
            s.push_back(e.to);
        for (size_t i = s.size(); i > 1; i--)
            std::swap(s[i - 1], s[size_t(rng() % i)]);
        return s;
    };
    std::vector<Frame> frames;
    frames.push_back({source, shuffled_succ(source), 0});
    seen[size_t(source)] = 1;
    while (!frames.empty()) {
        Frame &f = frames.back();
        if (f.next < f.succ.size()) {
            int32_t v = f.succ[f.next++];
            if (!seen[size_t(v)]) {
                seen[size_t(v)] = 1;
                frames.push_back({v, shuffled_succ(v), 0});
            }
        } else {
            finish.push_back(f.node);
            frames.pop_back();
        }
    }
    std::vector<int32_t> order(size_t(n), -1);
    int32_t rank = 0;
    for (auto it = finish.rbegin(); it != finish.rend(); ++it)
        order[size_t(*it)] = rank++;
    for (int32_t u = 0; u < n; u++)
        if (order[size_t(u)] < 0)
            order[size_t(u)] = rank++;
    return order;
}

} // namespace

LongestPathResult longest_simple_path(const RoutingGraph &g, const LongPathConfig &cfg)
{
    const int32_t n = g.node_count();
    if (g.source < 0 || g.sink < 0 || g.source >= n || g.sink >= n)
        throw InvalidParams("graph has no designated source/sink");
    if (!forward_reachable(g, g.source)[size_t(g.sink)])
        throw Unreachable("sink is not reachable from source");

    auto reachable = scc_reachable(g, g.source, g.sink);
    std::mt19937_64 rng(cfg.seed);
    auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&]() {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    LongestPathResult result;
    result.seed = cfg.seed;

    std::vector<int32_t> order = dfs_order(g, g.source, rng);
    int64_t iterations = 0;
    auto run_dp = [&](const std::vector<int32_t> &ord) {
        iterations++;
        return dag_longest_path(g, ord, g.source, g.sink);
    };

    std::optional<std::vector<int32_t>> local = run_dp(order);
    int64_t local_edges = local ? int64_t(local->size()) - 1 : -1;

    std::vector<int32_t> best_path = local ? *local : std::vector<int32_t>{};
    int64_t best_edges = local_edges;
    int64_t best_delay = local ? path_delay(g, *local) : 0;

    int32_t stagnation = 0;
    while (true) {
        if (cfg.max_iters) {
            if (iterations >= *cfg.max_iters)
                break;
        } else if (iterations % 64 == 0 && elapsed() >= cfg.budget_s) {
            break;
        }

        // Backward edges incident to the current path are the relaxation
        // candidates: moving the head right after the tail makes the edge
        // usable by the next DP pass.
        std::vector<std::pair<int32_t, int32_t>> cands;
        if (local) {
            std::vector<uint8_t> on_path(size_t(n), 0);
            for (int32_t u : *local)
                on_path[size_t(u)] = 1;
            for (int32_t u = 0; u < n; u++)
                for (const auto &e : g.adj[size_t(u)])
                    if (order[size_t(e.to)] < order[size_t(u)] && (on_path[size_t(u)] || on_path[size_t(e.to)]))
                        cands.push_back({u, e.to});
        }

        bool accepted = false;
        if (!cands.empty()) {
            auto [u, v] = cands[size_t(rng() % cands.size())];
            // Block move: lift v out and reinsert immediately after u.
            std::vector<int32_t> by_rank(static_cast<size_t>(n));
            for (int32_t w = 0; w < n; w++)
                by_rank[size_t(order[size_t(w)])] = w;
            std::vector<int32_t> seq;
            seq.reserve(size_t(n));
            for (int32_t w : by_rank)
                if (w != v)
                    seq.push_back(w);
            std::vector<int32_t> cand_order(static_cast<size_t>(n));
            int32_t rank = 0;
            for (int32_t w : seq) {
                cand_order[size_t(w)] = rank++;
                if (w == u)
                    cand_order[size_t(v)] = rank++;
            }
            auto cand_path = run_dp(cand_order);
            int64_t cand_edges = cand_path ? int64_t(cand_path->size()) - 1 : -1;
            if (cand_edges > local_edges) {
                order = std::move(cand_order);
                local = std::move(cand_path);
                local_edges = cand_edges;
                accepted = true;
                int64_t d = path_delay(g, *local);
                if (local_edges > best_edges || (local_edges == best_edges && d > best_delay)) {
                    best_path = *local;
                    best_edges = local_edges;
                    best_delay = d;
                }
            }
        }
        if (accepted) {
            stagnation = 0;
        } else {
            stagnation++;
            if (stagnation >= cfg.stagnation_limit) {
                order = dfs_order(g, g.source, rng);
                local = run_dp(order);
                local_edges = local ? int64_t(local->size()) - 1 : -1;
                if (local) {
                    int64_t d = path_delay(g, *local);
                    if (local_edges > best_edges || (local_edges == best_edges && d > best_delay)) {
                        best_path = *local;
                        best_edges = local_edges;
                        best_delay = d;
                    }
                }
                stagnation = 0;
            }
        }
    }

    result.path = best_path;
    result.t_delay_ps = best_delay;
    result.f_wires = fwires(best_path, reachable);
    result.budget_used_s = elapsed();
    result.iterations = iterations;
    return result;
}

double fwires(const std::vector<int32_t> &path, const std::vector<int32_t> &reachable)
{
    if (reachable.empty())
        throw EmptyReachableSet("reachable set is empty");
    std::set<int32_t> rs(reachable.begin(), reachable.end());
    int64_t used = 0;
    for (int32_t u : path)
        if (rs.count(u))
            used++;
    return double(used) / double(rs.size());
}

LoweredDesign path_to_routing(const DeviceDB &db, const RoutingGraph &g, const std::vector<int32_t> &path,
                              const std::string &in_pad, const std::string &out_pad)
{
    if (path.size() < 2)
        throw IllegalPath("path must contain at least source and sink");
    {
        std::set<int32_t> uniq(path.begin(), path.end());
        if (uniq.size() != path.size())
            throw IllegalPath("path is not simple");
    }
    auto in_bel = db.pad_by_name(in_pad);
    auto out_bel = db.pad_by_name(out_pad);
    if (!in_bel || !out_bel)
        throw BadPad("unknown endpoint pad");

    const int K = db.params.lut_inputs;

    LoweredDesign out;
    out.netlist.top = "longpath";
    out.placement.seed = 0;

    Cell pin;
    pin.type = "PAD";
    pin.params["DIR"] = "in";
    pin.conns["PADOUT"] = out.netlist.add_net();
    out.netlist.cells.emplace("pad_in", pin);
    out.placement.cells["pad_in"] = *in_bel;
    out.placement.fixed.insert("pad_in");

    int32_t cur_net = 0;
    int32_t lut_count = 0;
    RouteTree tree;
    tree.net = cur_net;
    tree.source = g.nodes[size_t(path[0])];
    std::vector<PipId> walk;

    auto close_net = [&](WireId sink_wire) {
        tree.sinks.emplace_back(sink_wire, walk);
        out.routing.nets.emplace(tree.net, tree);
        walk.clear();
    };

    for (size_t i = 0; i + 1 < path.size(); i++) {
        int32_t a = path[i], b = path[i + 1];
        const GraphEdge *edge = nullptr;
        for (const auto &e : g.adj[size_t(a)])
            if (e.to == b && (!edge || e.delay_ps > edge->delay_ps))
                edge = &e;
        if (!edge)
            throw IllegalPath("consecutive path nodes are not connected in the graph");
        if (edge->route_through) {
            // Close the electrical net at the LUT input and start a new one
            // at its output.
            close_net(g.nodes[size_t(a)]);
            std::string name = "rt" + std::to_string(lut_count++);
            Cell lut;
            lut.type = "LUTFF";
            lut.params["WIDTH"] = K;
            lut.params["LUT"] = LutMask::input_identity(K, edge->input).to_string();
            lut.params["FF_ENABLE"] = 0;
            lut.conns["I" + std::to_string(edge->input)] = cur_net;
            cur_net = out.netlist.add_net();
            lut.conns["Q"] = cur_net;
            out.netlist.cells.emplace(name, lut);
            out.placement.cells[name] = edge->bel;
            out.placement.fixed.insert(name);
            tree = RouteTree{};
            tree.net = cur_net;
            tree.source = g.nodes[size_t(b)];
        } else {
            if (!db.pip_exists(edge->pip) || !(db.pip_src(edge->pip) == g.nodes[size_t(a)]) ||
                !(db.pip_dst(edge->pip) == g.nodes[size_t(b)]))
                throw IllegalPath("pip edge does not exist in the device");
            walk.push_back(edge->pip);
        }
    }

    Cell pout;
    pout.type = "PAD";
    pout.params["DIR"] = "out";
    pout.conns["PADIN"] = cur_net;
    out.netlist.cells.emplace("pad_out", pout);
    out.placement.cells["pad_out"] = *out_bel;
    out.placement.fixed.insert("pad_out");
    close_net(g.nodes[size_t(path.back())]);

    return out;
}

} // namespace ipnr
