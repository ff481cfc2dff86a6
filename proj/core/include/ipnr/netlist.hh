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

#ifndef IPNR_NETLIST_HH
#define IPNR_NETLIST_HH

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ipnr/base.hh"

namespace ipnr {

struct SyntaxError : Error
{
    using Error::Error;
};
struct NoTopModule : Error
{
    using Error::Error;
};
struct DanglingNet : Error
{
    using Error::Error;
};
struct MultipleDrivers : Error
{
    using Error::Error;
};
struct BadMaskWidth : Error
{
    using Error::Error;
};

enum class PortDir : uint8_t
{
    INPUT,
    OUTPUT,
};

struct Cell
{
    std::string type; // $lut, $dff, LUT_K, MUX2, LUTFF, PAD
    std::map<std::string, nlohmann::json> params;
    std::map<std::string, int32_t> conns; // port -> net id
    std::map<std::string, nlohmann::json> attrs;

    friend bool operator==(const Cell &, const Cell &) = default;
};

struct TopPort
{
    PortDir dir;
    int32_t net;
    friend bool operator==(const TopPort &, const TopPort &) = default;
};

struct PortRef
{
    std::string cell; // empty string means a top-level port
    std::string port;
    friend bool operator==(const PortRef &, const PortRef &) = default;
    friend auto operator<=>(const PortRef &, const PortRef &) = default;
};

struct NetInfo
{
    std::optional<PortRef> driver;
    std::vector<PortRef> sinks; // sorted canonically
};

struct Diagnostic
{
    std::string level = "ERROR";
    std::string object;
    std::string rule;
    std::string str() const { return level + " " + object + ": " + rule; }
};

struct Netlist
{
    std::string top;
    std::map<std::string, TopPort> ports;
    std::map<std::string, Cell> cells;
    std::map<std::string, nlohmann::json> attributes;
    int32_t num_nets = 0;

    // Driver/sink table rebuilt from the connections; nets with several
    // drivers keep the first in canonical order (validate reports them).
    std::vector<NetInfo> net_table() const;

    int32_t add_net() { return num_nets++; }

    friend bool operator==(const Netlist &, const Netlist &) = default;
};

// Which ports of the known cell kinds drive their net.
bool is_output_port(const std::string &cell_type, const std::string &port);
// True for cell kinds a flow stage may encounter at all.
bool is_known_cell_type(const std::string &cell_type);

Netlist parse_netlist(const std::string &text);
std::string write_netlist(const Netlist &n);

std::vector<Diagnostic> validate(const Netlist &n);

} // namespace ipnr

#endif
