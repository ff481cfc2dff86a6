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

#include "ipnr/timing.hh"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <set>

namespace ipnr {

using nlohmann::json;

int64_t estimate_delay(const DeviceDB &db, WireId from, WireId to, const DelayModel &model)
{
    if (from == to || from == GLOBAL_CLOCK_WIRE || to == GLOBAL_CLOCK_WIRE)
        return 0;
    int64_t dist = std::abs(int(from.x) - int(to.x)) + std::abs(int(from.y) - int(to.y));
    // Every tile crossing needs at least one inter-tile or pad-connection pip.
    int64_t est = dist * std::min(model.inter_tile_ps, model.connection_ps);
    auto bel_pin = [&](WireId w) {
        WireClass cls = db.wire_class(w);
        return cls == WireClass::BEL_IN || cls == WireClass::BEL_OUT;
    };
    if (bel_pin(from))
        est += model.connection_ps;
    if (bel_pin(to))
        est += model.connection_ps;
    return est;
}

int64_t route_sink_delay(const DeviceDB &db, const RouteTree &tree, WireId sink, const DelayModel &model)
{
    for (const auto &[wire, pips] : tree.sinks)
        if (wire == sink) {
            int64_t sum = 0;
            for (PipId p : pips)
                sum += model.pip_delay(db.pip_class(p));
            return sum;
        }
    throw Error("sink wire not in route tree");
}

namespace {

// Path arrival bookkeeping: worst over all paths, and worst over
// register-launched paths only (absent = -1).
struct Arr
{
    int64_t any = -1;
    int64_t ff = -1;
};

bool is_comb_cell(const Cell &c)
{
    if (c.type == "$lut" || c.type == "LUT_K" || c.type == "MUX2")
        return true;
    if (c.type == "LUTFF") {
        auto it = c.params.find("FF_ENABLE");
        return it == c.params.end() || it->second.get<int>() == 0;
    }
    return false;
}

bool is_ff_lutff(const Cell &c)
{
    if (c.type == "$dff")
        return true;
    if (c.type != "LUTFF")
        return false;
    auto it = c.params.find("FF_ENABLE");
    return it != c.params.end() && it->second.get<int>() != 0;
}

} // namespace

json TimingReport::to_json() const
{
    json doc;
    doc["fmax_mhz"] = fmax_mhz;
    doc["worst_path_ps"] = worst_path_ps;
    doc["critical_path"] = critical_path;
    json eps = json::array();
    for (const auto &e : endpoints)
        eps.push_back({{"name", e.name}, {"arrival_ps", e.arrival_ps}, {"slack_ps", e.slack_ps}});
    doc["endpoints"] = eps;
    return doc;
}

TimingReport sta(const DeviceDB &db, const Netlist &n, const Placement &placement, const Routing *routing,
                 const DelayModel &model, std::optional<int64_t> period_ps)
{
    auto nets = n.net_table();
    auto clks_v = clock_nets(n);
    std::set<int32_t> clk(clks_v.begin(), clks_v.end());

    auto pin_wire = [&](const PortRef &ref) -> std::optional<WireId> {
        if (ref.cell.empty())
            return std::nullopt;
        auto it = placement.cells.find(ref.cell);
        if (it == placement.cells.end())
            return std::nullopt;
        return db.bel_pin_wire(it->second, ref.port);
    };
    auto net_delay = [&](int32_t net, const PortRef &sink) -> int64_t {
        auto w = pin_wire(sink);
        if (routing && w) {
            auto it = routing->nets.find(net);
            if (it != routing->nets.end())
                return route_sink_delay(db, it->second, *w, model);
        }
        const NetInfo &ni = nets[size_t(net)];
        if (!ni.driver || !w)
            return 0;
        auto src = pin_wire(*ni.driver);
        if (!src)
            return 0;
        return estimate_delay(db, *src, *w, model);
    };

    // Combinational cells and a topological order over them.
    std::map<std::string, const Cell *> comb;
    std::map<int32_t, std::string> comb_out; // net -> driving comb cell
    for (const auto &[name, c] : n.cells) {
        if (c.type == "PAD" || !is_comb_cell(c))
            continue;
        comb[name] = &c;
        for (const auto &[port, net] : c.conns)
            if (is_output_port(c.type, port))
                comb_out[net] = name;
    }
    std::map<std::string, int> indeg;
    std::map<std::string, std::vector<std::string>> fanout;
    for (const auto &[name, cp] : comb) {
        indeg[name] = 0;
        for (const auto &[port, net] : cp->conns) {
            if (is_output_port(cp->type, port) || clk.count(net))
                continue;
            auto dit = comb_out.find(net);
            if (dit != comb_out.end()) {
                indeg[name]++;
                fanout[dit->second].push_back(name);
            }
        }
    }
    std::deque<std::string> ready;
    for (const auto &[name, d] : indeg)
        if (d == 0)
            ready.push_back(name);
    std::vector<std::string> order;
    while (!ready.empty()) {
        std::string name = ready.front();
        ready.pop_front();
        order.push_back(name);
        for (const auto &next : fanout[name])
            if (--indeg[next] == 0)
                ready.push_back(next);
    }
    if (order.size() != comb.size())
        throw CombinationalLoop("combinational cycle in timing graph");

    // Forward pass: arrival per net at the driver pin.
    std::vector<Arr> arr(size_t(n.num_nets));
    std::map<int32_t, PortRef> net_pred; // driver pin of each driven net
    for (const auto &[name, p] : n.ports)
        if (p.dir == PortDir::INPUT && !clk.count(p.net)) {
            arr[size_t(p.net)].any = 0;
            net_pred[p.net] = PortRef{"", name};
        }
    for (const auto &[name, c] : n.cells) {
        if (c.type == "PAD") {
            auto it = c.conns.find("PADOUT");
            if (it != c.conns.end() && !clk.count(it->second)) {
                arr[size_t(it->second)].any = 0;
                net_pred[it->second] = PortRef{name, "PADOUT"};
            }
        } else if (is_ff_lutff(c)) {
            auto it = c.conns.find("Q");
            if (it != c.conns.end()) {
                arr[size_t(it->second)] = {model.ff_clk_q_ps, model.ff_clk_q_ps};
                net_pred[it->second] = PortRef{name, "Q"};
            }
        }
    }
    // Worst input pin of a cell (any-path metric) and the resulting Arr.
    std::map<std::string, PortRef> crit_in;
    auto gather_inputs = [&](const std::string &name, const Cell &c, Arr &out, PortRef &worst) {
        out = {-1, -1};
        for (const auto &[port, net] : c.conns) {
            if (is_output_port(c.type, port) || port == "CLK" || clk.count(net))
                continue;
            const Arr &a = arr[size_t(net)];
            if (a.any < 0)
                continue;
            int64_t d = net_delay(net, PortRef{name, port});
            if (a.any + d > out.any) {
                out.any = a.any + d;
                worst = PortRef{name, port};
            }
            if (a.ff >= 0)
                out.ff = std::max(out.ff, a.ff + d);
        }
    };
    for (const auto &name : order) {
        const Cell &c = *comb.at(name);
        Arr in;
        PortRef worst;
        gather_inputs(name, c, in, worst);
        if (in.any < 0)
            continue;
        crit_in[name] = worst;
        Arr out{in.any + model.lut_comb_ps, in.ff < 0 ? -1 : in.ff + model.lut_comb_ps};
        for (const auto &[port, net] : c.conns)
            if (is_output_port(c.type, port)) {
                arr[size_t(net)] = out;
                net_pred[net] = PortRef{name, port};
            }
    }

    // Endpoints.
    struct Ep
    {
        std::string name;
        Arr arrival;
        PortRef pred;
        bool reg = false; // register endpoint (Fmax-relevant when ff-launched)
    };
    std::vector<Ep> eps;
    for (const auto &[name, c] : n.cells) {
        if (is_ff_lutff(c) && c.type == "LUTFF") {
            Arr in;
            PortRef worst;
            gather_inputs(name, c, in, worst);
            if (in.any < 0)
                continue;
            int64_t extra = model.lut_comb_ps + model.ff_setup_ps;
            eps.push_back({name, {in.any + extra, in.ff < 0 ? -1 : in.ff + extra}, worst, true});
        } else if (c.type == "$dff") {
            auto it = c.conns.find("D");
            if (it == c.conns.end() || arr[size_t(it->second)].any < 0)
                continue;
            const Arr &a = arr[size_t(it->second)];
            int64_t d = net_delay(it->second, PortRef{name, "D"});
            eps.push_back(
                {name, {a.any + d + model.ff_setup_ps, a.ff < 0 ? -1 : a.ff + d + model.ff_setup_ps},
                 PortRef{name, "D"}, true});
        } else if (c.type == "PAD") {
            auto it = c.conns.find("PADIN");
            if (it == c.conns.end() || arr[size_t(it->second)].any < 0)
                continue;
            const Arr &a = arr[size_t(it->second)];
            int64_t d = net_delay(it->second, PortRef{name, "PADIN"});
            eps.push_back({name, {a.any + d, a.ff < 0 ? -1 : a.ff + d}, PortRef{name, "PADIN"}, false});
        }
    }
    for (const auto &[name, p] : n.ports)
        if (p.dir == PortDir::OUTPUT && arr[size_t(p.net)].any >= 0) {
            const Arr &a = arr[size_t(p.net)];
            eps.push_back({name, a, PortRef{"", name}, false});
        }

    TimingReport rep;
    int64_t worst = 0, worst_rr = 0;
    const Ep *worst_ep = nullptr;
    for (const auto &e : eps) {
        if (e.arrival.any > worst || worst_ep == nullptr) {
            worst = std::max<int64_t>(e.arrival.any, 0);
            worst_ep = &e;
        }
        if (e.reg && e.arrival.ff > worst_rr)
            worst_rr = e.arrival.ff;
    }
    rep.worst_path_ps = worst;
    rep.fmax_mhz = worst_rr > 0 ? 1e6 / double(worst_rr) : 0.0;
    int64_t period = period_ps.value_or(worst);

    for (const auto &e : eps)
        rep.endpoints.push_back({e.name, e.arrival.any, period - e.arrival.any});
    std::sort(rep.endpoints.begin(), rep.endpoints.end(),
              [](const Endpoint &a, const Endpoint &b) { return a.name < b.name; });

    // Backward pass: required time per net (at its driver pin).
    std::vector<int64_t> req(size_t(n.num_nets), INT64_MAX);
    std::vector<std::pair<PinKey, int64_t>> pin_slack; // sink pin -> slack
    auto relax_req = [&](int32_t net, const PortRef &sink, int64_t pin_req) {
        int64_t d = net_delay(net, sink);
        req[size_t(net)] = std::min(req[size_t(net)], pin_req - d);
        if (arr[size_t(net)].any >= 0)
            pin_slack.push_back({{sink.cell, sink.port}, pin_req - (arr[size_t(net)].any + d)});
    };
    for (const auto &[name, p] : n.ports)
        if (p.dir == PortDir::OUTPUT)
            relax_req(p.net, PortRef{"", name}, period);
    for (const auto &[name, c] : n.cells) {
        if (c.type == "PAD") {
            auto it = c.conns.find("PADIN");
            if (it != c.conns.end())
                relax_req(it->second, PortRef{name, "PADIN"}, period);
        } else if (c.type == "$dff") {
            auto it = c.conns.find("D");
            if (it != c.conns.end())
                relax_req(it->second, PortRef{name, "D"}, period - model.ff_setup_ps);
        } else if (is_ff_lutff(c)) {
            int64_t pin_req = period - model.lut_comb_ps - model.ff_setup_ps;
            for (const auto &[port, net] : c.conns)
                if (!is_output_port(c.type, port) && port != "CLK" && !clk.count(net))
                    relax_req(net, PortRef{name, port}, pin_req);
        }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const Cell &c = *comb.at(*it);
        int64_t out_req = INT64_MAX;
        for (const auto &[port, net] : c.conns)
            if (is_output_port(c.type, port))
                out_req = std::min(out_req, req[size_t(net)]);
        if (out_req == INT64_MAX)
            continue;
        int64_t pin_req = out_req - model.lut_comb_ps;
        for (const auto &[port, net] : c.conns)
            if (!is_output_port(c.type, port) && port != "CLK" && !clk.count(net))
                relax_req(net, PortRef{*it, port}, pin_req);
    }

    int64_t max_slack = 0;
    for (const auto &[pin, slack] : pin_slack)
        max_slack = std::max(max_slack, slack);
    for (const auto &[pin, slack] : pin_slack) {
        double crit = max_slack > 0 ? 1.0 - double(slack) / double(max_slack) : 1.0;
        crit = std::clamp(crit, 0.0, 1.0);
        auto it = rep.criticality.find(pin);
        if (it == rep.criticality.end() || it->second < crit)
            rep.criticality[pin] = crit;
    }

    // Critical path: walk back from the worst endpoint.
    if (worst_ep) {
        std::vector<std::string> path;
        path.push_back(worst_ep->name);
        PortRef cur = worst_ep->pred;
        while (true) {
            if (cur.cell.empty())
                break;
            auto cit = n.cells.find(cur.cell);
            if (cit == n.cells.end())
                break;
            const Cell &c = cit->second;
            auto nit = c.conns.find(cur.port);
            if (nit == c.conns.end() || is_output_port(c.type, cur.port))
                break;
            int32_t net = nit->second;
            path.push_back("net " + std::to_string(net));
            auto pit = net_pred.find(net);
            if (pit == net_pred.end())
                break;
            const PortRef &drv = pit->second;
            if (drv.cell.empty()) {
                path.push_back("port " + drv.port);
                break;
            }
            path.push_back(drv.cell);
            auto prev = crit_in.find(drv.cell);
            if (prev == crit_in.end())
                break; // start point (FF or pad)
            cur = prev->second;
        }
        std::reverse(path.begin(), path.end());
        rep.critical_path = std::move(path);
    }
    return rep;
}

} // namespace ipnr
