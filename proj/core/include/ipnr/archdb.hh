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

#ifndef IPNR_ARCHDB_HH
#define IPNR_ARCHDB_HH

#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ipnr/base.hh"

namespace ipnr {

struct InvalidParams : Error
{
    using Error::Error;
};
struct UnknownWire : Error
{
    using Error::Error;
};
struct UnknownPin : Error
{
    using Error::Error;
};
struct OutOfGrid : Error
{
    using Error::Error;
};
struct CorruptDatabase : Error
{
    using Error::Error;
};
struct InvariantViolation : Error
{
    using Error::Error;
};

enum class TileKind : uint8_t
{
    CORNER = 0,
    IO_N = 1,
    IO_S = 2,
    IO_E = 3,
    IO_W = 4,
    LOGIC = 5,
};

enum class WireClass : uint8_t
{
    CHAN_H = 0,
    CHAN_V = 1,
    BEL_IN = 2,
    BEL_OUT = 3,
    PAD_IN = 4,  // fabric -> pad (readable by an output pad)
    PAD_OUT = 5, // pad -> fabric (driven by an input pad)
};

enum class PipClass : uint8_t
{
    INTER_TILE = 0,
    SWITCHBOX = 1,
    CONNECTION = 2,
};

enum class BelKind : uint8_t
{
    LUTFF = 0,
    PAD = 1,
};

const char *tile_kind_name(TileKind k);

struct ArchParams
{
    int32_t width = 8;         // W, tile columns, >= 3
    int32_t height = 8;        // H, tile rows, >= 3
    int32_t channel_width = 4; // C, wires per direction per tile
    int32_t lut_inputs = 4;    // K, 2..8
    int32_t bels_per_tile = 2; // N, LUTFF bels per logic tile
    int32_t pads_per_io = 2;   // P, pad bels per IO tile
    uint64_t seed = 1;

    void validate() const; // throws InvalidParams
    friend bool operator==(const ArchParams &, const ArchParams &) = default;
};

// Wire reference inside a tile type: (0,0) is tile-local, otherwise the
// local index is interpreted in the neighbour at (x+dx, y+dy).
struct WireRef
{
    int8_t dx = 0, dy = 0;
    int32_t index = -1;
    bool local() const { return dx == 0 && dy == 0; }
    friend bool operator==(const WireRef &, const WireRef &) = default;
    friend auto operator<=>(const WireRef &, const WireRef &) = default;
};

struct LocalWire
{
    std::string name;
    WireClass cls;
    int32_t delay_ps = 0;
    friend bool operator==(const LocalWire &, const LocalWire &) = default;
};

struct LocalPip
{
    WireRef src, dst;
    PipClass cls;
    int32_t delay_ps;
    friend bool operator==(const LocalPip &, const LocalPip &) = default;
};

struct BelPin
{
    std::string name;
    int32_t wire = -1; // local wire index; -1 means the global clock wire
    friend bool operator==(const BelPin &, const BelPin &) = default;
};

struct LocalBel
{
    std::string name;
    BelKind kind;
    std::vector<BelPin> pins;
    friend bool operator==(const LocalBel &, const LocalBel &) = default;
};

struct TileType
{
    TileKind kind;
    std::vector<LocalWire> wires;
    std::vector<LocalPip> pips; // sorted canonically; index is the PipId index
    std::vector<LocalBel> bels;

    // Byte-exact canonical encoding; tile-type identity for deduplication.
    std::vector<uint8_t> canonical_bytes() const;
    friend bool operator==(const TileType &, const TileType &) = default;
};

struct PipInfo
{
    PipId pip;
    WireId src, dst;
    PipClass cls;
    int32_t delay_ps;
};

struct ExpandedTile
{
    std::vector<std::pair<WireId, std::string>> wires; // id, printable name
    std::vector<PipInfo> pips;                         // boundary-clipped
    std::vector<std::pair<BelId, BelKind>> bels;
};

class DeviceDB
{
  public:
    ArchParams params;
    std::vector<TileType> tile_types;
    std::vector<int32_t> grid; // row-major, index y * W + x

    static DeviceDB generate(const ArchParams &params);

    void save(const std::string &path) const;
    std::vector<uint8_t> save_bytes() const;
    static DeviceDB load(const std::string &path);
    static DeviceDB load_bytes(const std::vector<uint8_t> &bytes);

    uint64_t device_hash() const; // FNV-1a 64 of save_bytes()

    int32_t width() const { return params.width; }
    int32_t height() const { return params.height; }
    bool in_grid(int x, int y) const { return x >= 0 && x < width() && y >= 0 && y < height(); }
    const TileType &tile(int x, int y) const { return tile_types[size_t(grid[size_t(y) * width() + x])]; }

    bool wire_exists(WireId w) const;
    std::string wire_name(WireId w) const; // "X{x}Y{y}_{local}"
    std::string local_wire_name(WireId w) const;
    WireClass wire_class(WireId w) const;
    int32_t wire_delay(WireId w) const;
    std::optional<WireId> wire_by_name(const std::string &name) const;

    bool pip_exists(PipId p) const; // false for boundary-clipped entries
    WireId pip_src(PipId p) const;
    WireId pip_dst(PipId p) const;
    PipClass pip_class(PipId p) const;
    int32_t pip_delay(PipId p) const;
    std::string pip_name(PipId p) const; // "X{x}Y{y}.pip.{dst}.{src}"

    struct Adj
    {
        PipId pip;
        WireId wire; // the other endpoint
        int32_t delay_ps;
    };
    // Sorted by the canonical order of the pip. Throws UnknownWire.
    const std::vector<Adj> &downhill(WireId w) const;
    const std::vector<Adj> &uphill(WireId w) const;

    bool bel_exists(BelId b) const;
    BelKind bel_kind(BelId b) const;
    std::string bel_name(BelId b) const; // "X{x}Y{y}.{local}" e.g. X1Y1.bel0
    WireId bel_pin_wire(BelId b, const std::string &pin) const;
    std::vector<BelId> all_bels() const; // canonical order

    // Pads in canonical bel order, named "PAD0", "PAD1", ...
    std::vector<std::pair<std::string, BelId>> pad_list() const;
    std::optional<BelId> pad_by_name(const std::string &name) const;

    // Dense wire numbering used by the router and path search.
    int64_t wire_count() const { return total_wires_; }
    int64_t wire_flat(WireId w) const;
    WireId wire_unflat(int64_t idx) const;

    ExpandedTile expand_tile_instance(int x, int y) const;

    // Per-class statistics for reports.
    int64_t pip_count() const;
    int64_t bel_count() const;

    void check_invariants() const; // throws InvariantViolation

  private:
    void build_index();

    int64_t total_wires_ = 0;
    std::vector<int64_t> wire_base_;                 // per grid position
    std::vector<std::vector<Adj>> downhill_, uphill_; // per flat wire
    std::vector<std::unordered_map<std::string, int32_t>> wire_name_idx_; // per tile type
};

// Naive (pre-deduplication) construction: the full relative-form record of
// one grid position, straight from the fabric formulas. generate() feeds
// these through deduplicate(); tests compare against them directly.
TileType naive_tile_record(const ArchParams &params, int x, int y);

// Deduplicate a full per-position listing into shared records plus a grid.
void deduplicate(const std::vector<TileType> &naive_tiles, int width, int height,
                 std::vector<TileType> &tile_types_out, std::vector<int32_t> &grid_out);

// Serialized size of the naive (per-instance) database, for compression
// ratio measurements.
std::vector<uint8_t> serialize_naive(const ArchParams &params);

// Partial binding maps kept by the placer and router; single writer.
class BindingState
{
  public:
    struct BoundCell
    {
        std::string name;
        BelKind kind;
        bool ff_enable = false;
        int32_t clock_net = -1; // -1 when no clock
    };

    void bind_wire(WireId w, int32_t net);
    void unbind_wire(WireId w);
    int32_t wire_net(WireId w) const; // -1 if unbound

    void bind_pip(PipId p, int32_t net);
    void unbind_pip(PipId p);
    int32_t pip_net(PipId p) const;

    void bind_bel(BelId b, const BoundCell &cell);
    void unbind_bel(BelId b);
    const BoundCell *bel_cell(BelId b) const;

    const std::map<WireId, int32_t> &wires() const { return wire_to_net_; }
    const std::map<PipId, int32_t> &pips() const { return pip_to_net_; }
    const std::map<BelId, BoundCell> &bels() const { return bel_to_cell_; }

    // Consistency audit over the whole state; empty result means consistent.
    std::vector<std::string> audit(const DeviceDB &db) const;

  private:
    std::map<WireId, int32_t> wire_to_net_;
    std::map<PipId, int32_t> pip_to_net_;
    std::map<BelId, BoundCell> bel_to_cell_;
};

// True iff the bel is free, kinds match, and tile-level constraints stay
// satisfied (all FF-enabled LUTFFs in one tile share a clock net).
bool check_bel_validity(const DeviceDB &db, const BindingState &state, const BindingState::BoundCell &cell,
                        BelId bel);

} // namespace ipnr

#endif
