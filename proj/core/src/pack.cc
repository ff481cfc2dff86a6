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

#include "ipnr/pack.hh"

#include <algorithm>
#include <deque>
#include <set>

#include "ipnr/techmap.hh"

namespace ipnr {

namespace {

bool param_flag(const Cell &c, const std::string &name)
{
    auto it = c.params.find(name);
    if (it == c.params.end())
        return false;
    if (it->second.is_number_integer())
        return it->second.get<int>() != 0;
    if (it->second.is_string())
        return it->second.get<std::string>() != "0" && !it->second.get<std::string>().empty();
    return false;
}

bool is_ff_cell(const Cell &c)
{
    return c.type == "$dff" || (c.type == "LUTFF" && param_flag(c, "FF_ENABLE"));
}

std::string pad_dir(const Cell &c)
{
    auto it = c.params.find("DIR");
    if (it != c.params.end() && it->second.is_string())
        return it->second.get<std::string>();
    // Fall back on which pin is connected.
    if (c.conns.count("PADOUT"))
        return "in";
    return "out";
}

} // namespace

std::vector<int32_t> clock_nets(const Netlist &n)
{
    std::set<int32_t> clk;
    for (const auto &[name, c] : n.cells) {
        if (c.type == "$dff") {
            auto it = c.conns.find("C");
            if (it != c.conns.end())
                clk.insert(it->second);
        } else if (c.type == "LUTFF") {
            auto it = c.conns.find("CLK");
            if (it != c.conns.end())
                clk.insert(it->second);
        }
    }
    return {clk.begin(), clk.end()};
}

void compact_nets(Netlist &n)
{
    std::set<int32_t> used;
    for (const auto &[name, p] : n.ports)
        used.insert(p.net);
    for (const auto &[name, c] : n.cells)
        for (const auto &[port, net] : c.conns)
            used.insert(net);
    std::map<int32_t, int32_t> remap;
    int32_t next = 0;
    for (int32_t id : used)
        remap[id] = next++;
    for (auto &[name, p] : n.ports)
        p.net = remap.at(p.net);
    for (auto &[name, c] : n.cells)
        for (auto &[port, net] : c.conns)
            net = remap.at(net);
    n.num_nets = next;
}

Netlist pack_netlist(const Netlist &n, int K)
{
    for (const auto &[name, c] : n.cells)
        if (c.type != "LUT_K" && c.type != "$dff" && c.type != "PAD" && c.type != "LUTFF")
            throw UnpackableCell("cannot pack cell '" + name + "' of kind '" + c.type + "'");

    auto clks = clock_nets(n);
    if (clks.size() > 1)
        throw ClockDomainError("design uses " + std::to_string(clks.size()) + " clock nets, fabric has one");

    auto nets = n.net_table();

    Netlist out;
    out.top = n.top;
    out.ports = n.ports;
    out.attributes = n.attributes;
    out.num_nets = n.num_nets;

    // Merge candidates in canonical name order: a LUT whose output feeds
    // exactly one sink, that sink being a $dff D input.
    std::set<std::string> merged_dffs;
    std::map<std::string, std::string> lut_merge; // lut name -> dff name
    for (const auto &[name, c] : n.cells) {
        if (c.type != "LUT_K")
            continue;
        auto yit = c.conns.find("Y");
        if (yit == c.conns.end())
            continue;
        const NetInfo &ni = nets[size_t(yit->second)];
        if (ni.sinks.size() != 1)
            continue;
        const PortRef &sink = ni.sinks[0];
        if (sink.cell.empty() || sink.port != "D")
            continue;
        auto cit = n.cells.find(sink.cell);
        if (cit == n.cells.end() || cit->second.type != "$dff")
            continue;
        if (merged_dffs.count(sink.cell))
            continue;
        merged_dffs.insert(sink.cell);
        lut_merge[name] = sink.cell;
    }

    for (const auto &[name, c] : n.cells) {
        if (c.type == "PAD" || c.type == "LUTFF") {
            out.cells.emplace(name, c);
            continue;
        }
        if (c.type == "LUT_K") {
            int w = c.params.at("WIDTH").get<int>();
            if (w != K)
                throw UnpackableCell("cell '" + name + "' has width " + std::to_string(w) + ", device LUTs have " +
                                     std::to_string(K));
            Cell lf;
            lf.type = "LUTFF";
            lf.params["WIDTH"] = K;
            lf.params["LUT"] = c.params.at("LUT");
            for (int k = 0; k < K; k++) {
                auto it = c.conns.find("A" + std::to_string(k));
                if (it != c.conns.end())
                    lf.conns["I" + std::to_string(k)] = it->second;
            }
            auto mit = lut_merge.find(name);
            if (mit != lut_merge.end()) {
                const Cell &dff = n.cells.at(mit->second);
                lf.params["FF_ENABLE"] = 1;
                lf.conns["CLK"] = dff.conns.at("C");
                lf.conns["Q"] = dff.conns.at("Q");
                lf.attrs["IPNR_ORIGIN"] = name + "," + mit->second;
            } else {
                lf.params["FF_ENABLE"] = 0;
                lf.conns["Q"] = c.conns.at("Y");
                lf.attrs["IPNR_ORIGIN"] = name;
            }
            out.cells.emplace(name, std::move(lf));
            continue;
        }
        // $dff
        if (merged_dffs.count(name))
            continue;
        Cell lf;
        lf.type = "LUTFF";
        lf.params["WIDTH"] = K;
        lf.params["LUT"] = LutMask::input_identity(K, 0).to_string();
        lf.params["FF_ENABLE"] = 1;
        lf.conns["I0"] = c.conns.at("D");
        lf.conns["CLK"] = c.conns.at("C");
        lf.conns["Q"] = c.conns.at("Q");
        lf.attrs["IPNR_ORIGIN"] = name;
        out.cells.emplace(name, std::move(lf));
    }

    compact_nets(out);
    return out;
}

Trace simulate(const Netlist &n, const Stimulus &stimulus, int cycles)
{
    std::vector<int32_t> clk_list = clock_nets(n);
    std::set<int32_t> clk(clk_list.begin(), clk_list.end());

    // Combinational cells and the nets they drive.
    std::map<std::string, const Cell *> comb;
    std::map<int32_t, std::string> comb_driver; // net -> comb cell
    std::vector<const Cell *> ffs;
    std::map<std::string, int32_t> ff_q; // ff cell name -> Q net
    for (const auto &[name, c] : n.cells) {
        if (c.type == "PAD")
            continue;
        if (is_ff_cell(c)) {
            ffs.push_back(&c);
            auto qit = c.conns.find("Q");
            if (qit != c.conns.end())
                ff_q[name] = qit->second;
            continue;
        }
        comb[name] = &c;
        auto out = c.conns.find(is_output_port(c.type, "Y") ? "Y" : "Q");
        if (out != c.conns.end())
            comb_driver[out->second] = name;
    }

    // Levelize: Kahn over combinational dependencies.
    std::map<std::string, int> indeg;
    std::map<std::string, std::vector<std::string>> fanout;
    for (const auto &[name, c] : comb) {
        indeg[name] = 0;
        for (const auto &[port, net] : c->conns) {
            if (is_output_port(c->type, port) || clk.count(net))
                continue;
            auto dit = comb_driver.find(net);
            if (dit != comb_driver.end()) {
                indeg[name]++;
                fanout[dit->second].push_back(name);
            }
        }
    }
    std::deque<std::string> ready;
    for (const auto &[name, d] : indeg)
        if (d == 0)
            ready.push_back(name);
    std::vector<const Cell *> order;
    std::vector<std::string> order_names;
    while (!ready.empty()) {
        std::string name = ready.front();
        ready.pop_front();
        order.push_back(comb.at(name));
        order_names.push_back(name);
        for (const auto &next : fanout[name])
            if (--indeg[next] == 0)
                ready.push_back(next);
    }
    if (order.size() != comb.size())
        throw CombinationalLoop("combinational cycle through LUTs with no FF");

    auto eval_cell = [&](const Cell &c, const std::vector<uint8_t> &vals) -> uint8_t {
        auto in = [&](const std::string &port) -> uint8_t {
            auto it = c.conns.find(port);
            return it == c.conns.end() ? 0 : vals[size_t(it->second)];
        };
        if (c.type == "MUX2")
            return in("S") ? in("I1") : in("I0");
        int w = c.params.at("WIDTH").get<int>();
        LutMask mask = LutMask::from_string(w, c.params.at("LUT").get<std::string>());
        std::vector<uint8_t> inputs(static_cast<size_t>(w));
        const char *prefix = (c.type == "$lut" || c.type == "LUT_K") ? "A" : "I";
        for (int k = 0; k < w; k++)
            inputs[size_t(k)] = in(prefix + std::to_string(k));
        return eval_lut(mask, inputs);
    };

    std::map<std::string, uint8_t> state; // ff cell name -> Q value
    for (const auto &[name, net] : ff_q)
        state[name] = 0;

    Trace trace;
    std::vector<uint8_t> vals(size_t(n.num_nets), 0);
    for (int cycle = 0; cycle < cycles; cycle++) {
        std::fill(vals.begin(), vals.end(), 0);
        // Primary inputs.
        for (const auto &[name, p] : n.ports)
            if (p.dir == PortDir::INPUT && !clk.count(p.net)) {
                auto it = stimulus.find(name);
                if (it != stimulus.end() && size_t(cycle) < it->second.size())
                    vals[size_t(p.net)] = it->second[size_t(cycle)] ? 1 : 0;
            }
        for (const auto &[name, c] : n.cells)
            if (c.type == "PAD" && pad_dir(c) == "in") {
                auto cit = c.conns.find("PADOUT");
                if (cit == c.conns.end() || clk.count(cit->second))
                    continue;
                auto it = stimulus.find(name);
                if (it != stimulus.end() && size_t(cycle) < it->second.size())
                    vals[size_t(cit->second)] = it->second[size_t(cycle)] ? 1 : 0;
            }
        // Register outputs.
        for (const auto &[name, net] : ff_q)
            vals[size_t(net)] = state[name];
        // Combinational propagation.
        for (const Cell *c : order) {
            auto out = c->conns.find(is_output_port(c->type, "Y") ? "Y" : "Q");
            if (out != c->conns.end())
                vals[size_t(out->second)] = eval_cell(*c, vals);
        }
        // Observe outputs.
        std::map<std::string, uint8_t> obs;
        for (const auto &[name, p] : n.ports)
            if (p.dir == PortDir::OUTPUT)
                obs[name] = vals[size_t(p.net)];
        for (const auto &[name, c] : n.cells)
            if (c.type == "PAD" && pad_dir(c) == "out") {
                auto cit = c.conns.find("PADIN");
                if (cit != c.conns.end())
                    obs[name] = vals[size_t(cit->second)];
            }
        trace.push_back(std::move(obs));
        // Clock edge.
        std::map<std::string, uint8_t> next = state;
        for (const auto &[name, c] : n.cells) {
            if (!is_ff_cell(c) || !ff_q.count(name))
                continue;
            if (c.type == "$dff") {
                auto dit = c.conns.find("D");
                next[name] = dit == c.conns.end() ? 0 : vals[size_t(dit->second)];
            } else {
                next[name] = eval_cell(c, vals);
            }
        }
        state = std::move(next);
    }
    return trace;
}

} // namespace ipnr
