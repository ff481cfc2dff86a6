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

#include "ipnr/design.hh"

namespace ipnr {

using nlohmann::json;

namespace {

BelId bel_by_name(const DeviceDB &db, const std::string &name)
{
    int x = -1, y = -1;
    char local[64] = {0};
    if (std::sscanf(name.c_str(), "X%dY%d.%63s", &x, &y, local) != 3 || !db.in_grid(x, y))
        throw Error("bad bel name '" + name + "'");
    const TileType &tt = db.tile(x, y);
    for (size_t i = 0; i < tt.bels.size(); i++)
        if (tt.bels[i].name == local)
            return BelId{int16_t(x), int16_t(y), int32_t(i)};
    throw Error("bad bel name '" + name + "'");
}

PipId pip_by_name(const DeviceDB &db, const std::string &name)
{
    int x = -1, y = -1;
    if (std::sscanf(name.c_str(), "X%dY%d.pip.", &x, &y) != 2 || !db.in_grid(x, y))
        throw Error("bad pip name '" + name + "'");
    const TileType &tt = db.tile(x, y);
    for (size_t i = 0; i < tt.pips.size(); i++) {
        PipId p{int16_t(x), int16_t(y), int32_t(i)};
        if (db.pip_exists(p) && db.pip_name(p) == name)
            return p;
    }
    throw Error("bad pip name '" + name + "'");
}

} // namespace

void attach_placement(Netlist &n, const DeviceDB &db, const Placement &p)
{
    for (const auto &[cell, bel] : p.cells) {
        auto it = n.cells.find(cell);
        if (it == n.cells.end())
            throw Error("placement binds unknown cell '" + cell + "'");
        it->second.attrs["IPNR_BEL"] = db.bel_name(bel);
        if (p.fixed.count(cell))
            it->second.attrs["IPNR_FIXED"] = 1;
        else
            it->second.attrs.erase("IPNR_FIXED");
    }
    n.attributes["IPNR_SEED"] = p.seed;
}

Placement extract_placement(const Netlist &n, const DeviceDB &db)
{
    Placement p;
    for (const auto &[name, c] : n.cells) {
        auto it = c.attrs.find("IPNR_BEL");
        if (it == c.attrs.end())
            continue;
        p.cells[name] = bel_by_name(db, it->second.get<std::string>());
        auto fit = c.attrs.find("IPNR_FIXED");
        if (fit != c.attrs.end() && fit->second.get<int>() != 0)
            p.fixed.insert(name);
    }
    auto sit = n.attributes.find("IPNR_SEED");
    if (sit != n.attributes.end())
        p.seed = sit->second.get<uint64_t>();
    return p;
}

void attach_routing(Netlist &n, const DeviceDB &db, const Routing &r)
{
    json doc = json::object();
    for (const auto &[net, tree] : r.nets) {
        json tj = json::object();
        tj["source"] = db.wire_name(tree.source);
        json sinks = json::array();
        for (const auto &[wire, pips] : tree.sinks) {
            json sj = json::object();
            sj["wire"] = db.wire_name(wire);
            json pl = json::array();
            for (PipId p : pips)
                pl.push_back(db.pip_name(p));
            sj["pips"] = pl;
            sinks.push_back(sj);
        }
        tj["sinks"] = sinks;
        doc[std::to_string(net)] = tj;
    }
    n.attributes["IPNR_ROUTING"] = doc;
}

Routing extract_routing(const Netlist &n, const DeviceDB &db)
{
    Routing r;
    auto it = n.attributes.find("IPNR_ROUTING");
    if (it == n.attributes.end())
        return r;
    for (const auto &[key, tj] : it->second.items()) {
        RouteTree tree;
        tree.net = int32_t(std::stol(key));
        auto src = db.wire_by_name(tj.at("source").get<std::string>());
        if (!src)
            throw Error("routing names unknown wire " + tj.at("source").get<std::string>());
        tree.source = *src;
        for (const auto &sj : tj.at("sinks")) {
            auto wire = db.wire_by_name(sj.at("wire").get<std::string>());
            if (!wire)
                throw Error("routing names unknown wire " + sj.at("wire").get<std::string>());
            std::vector<PipId> pips;
            for (const auto &pj : sj.at("pips"))
                pips.push_back(pip_by_name(db, pj.get<std::string>()));
            tree.sinks.emplace_back(*wire, std::move(pips));
        }
        r.nets.emplace(tree.net, std::move(tree));
    }
    return r;
}

WireId cell_pin_wire(const DeviceDB &db, const Placement &p, const std::string &cell, const std::string &port)
{
    return db.bel_pin_wire(p.bel_of(cell), port);
}

BindingState design_bindings(const DeviceDB &db, const Netlist &n, const Placement &p, const Routing &r)
{
    BindingState state;
    for (const auto &[cell, bel] : p.cells) {
        const Cell &c = n.cells.at(cell);
        BindingState::BoundCell bc;
        bc.name = cell;
        bc.kind = c.type == "PAD" ? BelKind::PAD : BelKind::LUTFF;
        auto fit = c.params.find("FF_ENABLE");
        bc.ff_enable = fit != c.params.end() && fit->second.get<int>() != 0;
        auto cit = c.conns.find("CLK");
        bc.clock_net = cit == c.conns.end() ? -1 : cit->second;
        state.bind_bel(bel, bc);
    }
    for (const auto &[net, tree] : r.nets) {
        if (state.wire_net(tree.source) != net)
            state.bind_wire(tree.source, net);
        for (const auto &[wire, pips] : tree.sinks)
            for (PipId pip : pips) {
                if (state.pip_net(pip) != net)
                    state.bind_pip(pip, net);
                WireId dst = db.pip_dst(pip);
                if (state.wire_net(dst) != net)
                    state.bind_wire(dst, net);
            }
    }
    return state;
}

} // namespace ipnr
