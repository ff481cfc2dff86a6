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

#include "ipnr/netlist.hh"

#include <algorithm>
#include <set>

namespace ipnr {

using nlohmann::json;

bool is_output_port(const std::string &cell_type, const std::string &port)
{
    if (cell_type == "$lut" || cell_type == "LUT_K" || cell_type == "MUX2")
        return port == "Y";
    if (cell_type == "$dff" || cell_type == "LUTFF")
        return port == "Q";
    if (cell_type == "PAD")
        return port == "PADOUT";
    return false;
}

bool is_known_cell_type(const std::string &cell_type)
{
    return cell_type == "$lut" || cell_type == "$dff" || cell_type == "LUT_K" || cell_type == "MUX2" ||
           cell_type == "LUTFF" || cell_type == "PAD";
}

std::vector<NetInfo> Netlist::net_table() const
{
    std::vector<NetInfo> nets(static_cast<size_t>(num_nets));
    auto at = [&](int32_t id) -> NetInfo & {
        if (id < 0 || id >= num_nets)
            throw DanglingNet("net id " + std::to_string(id) + " out of range");
        return nets[size_t(id)];
    };
    for (const auto &[name, port] : ports) {
        if (port.dir == PortDir::INPUT) {
            if (!at(port.net).driver)
                at(port.net).driver = PortRef{"", name};
        } else {
            at(port.net).sinks.push_back(PortRef{"", name});
        }
    }
    for (const auto &[name, cell] : cells)
        for (const auto &[port, net] : cell.conns) {
            if (is_output_port(cell.type, port)) {
                if (!at(net).driver)
                    at(net).driver = PortRef{name, port};
            } else {
                at(net).sinks.push_back(PortRef{name, port});
            }
        }
    for (auto &n : nets)
        std::sort(n.sinks.begin(), n.sinks.end());
    return nets;
}

namespace {

bool mask_ok(const json &width, const json &mask)
{
    if (!width.is_number_integer() || !mask.is_string())
        return false;
    int w = width.get<int>();
    if (w < 0 || w > 20)
        return false;
    const std::string &m = mask.get_ref<const std::string &>();
    if (m.size() != (size_t(1) << w))
        return false;
    return std::all_of(m.begin(), m.end(), [](char c) { return c == '0' || c == '1'; });
}

int32_t parse_bits(const json &bits, const std::string &where)
{
    if (!bits.is_array() || bits.size() != 1 || !bits[0].is_number_integer())
        throw SyntaxError("expected single-bit 'bits' array at " + where);
    int32_t id = bits[0].get<int32_t>();
    if (id < 0)
        throw SyntaxError("negative net id at " + where);
    return id;
}

} // namespace

Netlist parse_netlist(const std::string &text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception &e) {
        throw SyntaxError(std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("modules") || !doc["modules"].is_object())
        throw SyntaxError("document has no 'modules' object");
    const json &modules = doc["modules"];
    if (modules.size() != 1)
        throw NoTopModule("expected exactly one module, found " + std::to_string(modules.size()));

    Netlist n;
    n.top = modules.begin().key();
    const json &mod = modules.begin().value();

    std::set<int32_t> declared;
    bool have_netnames = mod.contains("netnames") && mod["netnames"].is_object();
    if (have_netnames)
        for (const auto &[name, nn] : mod["netnames"].items())
            declared.insert(parse_bits(nn.value("bits", json::array()), "netname " + name));

    std::vector<int32_t> used;
    auto use = [&](int32_t id, const std::string &where) {
        if (have_netnames && !declared.count(id))
            throw DanglingNet("net " + std::to_string(id) + " at " + where + " is not declared");
        used.push_back(id);
        return id;
    };

    if (mod.contains("ports")) {
        if (!mod["ports"].is_object())
            throw SyntaxError("'ports' is not an object");
        for (const auto &[name, pj] : mod["ports"].items()) {
            std::string dir = pj.value("direction", "");
            if (dir == "inout")
                throw SyntaxError("inout port '" + name + "' is not supported");
            if (dir != "input" && dir != "output")
                throw SyntaxError("port '" + name + "' has bad direction '" + dir + "'");
            TopPort p;
            p.dir = dir == "input" ? PortDir::INPUT : PortDir::OUTPUT;
            p.net = use(parse_bits(pj.value("bits", json::array()), "port " + name), "port " + name);
            n.ports.emplace(name, p);
        }
    }
    if (mod.contains("cells")) {
        if (!mod["cells"].is_object())
            throw SyntaxError("'cells' is not an object");
        for (const auto &[name, cj] : mod["cells"].items()) {
            Cell c;
            c.type = cj.value("type", "");
            if (c.type.empty())
                throw SyntaxError("cell '" + name + "' has no type");
            if (cj.contains("parameters"))
                for (const auto &[k, v] : cj["parameters"].items())
                    c.params.emplace(k, v);
            if (cj.contains("attributes"))
                for (const auto &[k, v] : cj["attributes"].items())
                    c.attrs.emplace(k, v);
            if (cj.contains("connections"))
                for (const auto &[port, bits] : cj["connections"].items())
                    c.conns.emplace(port, use(parse_bits(bits, "cell " + name + " port " + port),
                                              "cell " + name + " port " + port));
            if (c.params.count("WIDTH") && c.params.count("LUT") && !mask_ok(c.params["WIDTH"], c.params["LUT"]))
                throw BadMaskWidth("cell '" + name + "': LUT mask length does not match 2^WIDTH");
            n.cells.emplace(name, std::move(c));
        }
    }
    if (mod.contains("attributes"))
        for (const auto &[k, v] : mod["attributes"].items())
            n.attributes.emplace(k, v);

    // Normalize net ids to dense integers preserving relative order.
    std::sort(used.begin(), used.end());
    used.erase(std::unique(used.begin(), used.end()), used.end());
    std::map<int32_t, int32_t> remap;
    for (size_t i = 0; i < used.size(); i++)
        remap[used[i]] = int32_t(i);
    for (auto &[name, p] : n.ports)
        p.net = remap.at(p.net);
    for (auto &[name, c] : n.cells)
        for (auto &[port, net] : c.conns)
            net = remap.at(net);
    n.num_nets = int32_t(used.size());

    // Single-driver invariant is part of the parse contract.
    std::vector<int> drivers(size_t(n.num_nets), 0);
    for (const auto &[name, p] : n.ports)
        if (p.dir == PortDir::INPUT)
            drivers[size_t(p.net)]++;
    for (const auto &[name, c] : n.cells)
        for (const auto &[port, net] : c.conns)
            if (is_output_port(c.type, port))
                drivers[size_t(net)]++;
    for (size_t i = 0; i < drivers.size(); i++)
        if (drivers[i] > 1)
            throw MultipleDrivers("net " + std::to_string(i) + " has " + std::to_string(drivers[i]) + " drivers");

    return n;
}

std::string write_netlist(const Netlist &n)
{
    json mod = json::object();
    json ports = json::object();
    for (const auto &[name, p] : n.ports)
        ports[name] = {{"direction", p.dir == PortDir::INPUT ? "input" : "output"}, {"bits", json::array({p.net})}};
    mod["ports"] = ports;
    json cells = json::object();
    for (const auto &[name, c] : n.cells) {
        json cj = json::object();
        cj["type"] = c.type;
        json params = json::object();
        for (const auto &[k, v] : c.params)
            params[k] = v;
        cj["parameters"] = params;
        json conns = json::object();
        for (const auto &[port, net] : c.conns)
            conns[port] = json::array({net});
        cj["connections"] = conns;
        if (!c.attrs.empty()) {
            json attrs = json::object();
            for (const auto &[k, v] : c.attrs)
                attrs[k] = v;
            cj["attributes"] = attrs;
        }
        cells[name] = cj;
    }
    mod["cells"] = cells;
    if (!n.attributes.empty()) {
        json attrs = json::object();
        for (const auto &[k, v] : n.attributes)
            attrs[k] = v;
        mod["attributes"] = attrs;
    }
    json doc = json::object();
    doc["modules"] = json::object();
    doc["modules"][n.top] = mod;
    return doc.dump(2) + "\n";
}

std::vector<Diagnostic> validate(const Netlist &n)
{
    std::vector<Diagnostic> diags;
    auto err = [&](const std::string &object, const std::string &rule) { diags.push_back({"ERROR", object, rule}); };

    std::vector<int> drivers(size_t(n.num_nets), 0), sinks(size_t(n.num_nets), 0);
    auto net_ok = [&](int32_t net) { return net >= 0 && net < n.num_nets; };

    for (const auto &[name, p] : n.ports) {
        if (!net_ok(p.net)) {
            err("port " + name, "DanglingNet");
            continue;
        }
        (p.dir == PortDir::INPUT ? drivers : sinks)[size_t(p.net)]++;
    }
    for (const auto &[name, c] : n.cells) {
        if (!is_known_cell_type(c.type))
            err("cell " + name, "UnknownKind(" + c.type + ")");
        for (const auto &[port, net] : c.conns) {
            if (!net_ok(net)) {
                err("cell " + name + " port " + port, "DanglingNet");
                continue;
            }
            (is_output_port(c.type, port) ? drivers : sinks)[size_t(net)]++;
        }
        if (c.type == "$lut" || c.type == "LUT_K") {
            auto wit = c.params.find("WIDTH");
            auto lit = c.params.find("LUT");
            if (wit == c.params.end() || lit == c.params.end() || !mask_ok(wit->second, lit->second))
                err("cell " + name, "BadMaskWidth");
        }
        if (c.type == "$dff") {
            std::set<std::string> want{"C", "D", "Q"};
            std::set<std::string> got;
            for (const auto &[port, net] : c.conns)
                got.insert(port);
            if (got != want)
                err("cell " + name, "BadDffPorts");
        }
        if (c.type == "LUTFF") {
            auto fit = c.params.find("FF_ENABLE");
            bool ff = fit != c.params.end() && fit->second.is_number_integer() && fit->second.get<int>() != 0;
            if (ff && !c.conns.count("CLK"))
                err("cell " + name, "MissingClock");
        }
    }
    for (int32_t i = 0; i < n.num_nets; i++) {
        if (drivers[size_t(i)] > 1)
            err("net " + std::to_string(i), "MultipleDrivers");
        if (drivers[size_t(i)] == 0 && sinks[size_t(i)] > 0)
            err("net " + std::to_string(i), "NoDriver");
    }
    return diags;
}

} // namespace ipnr
