#include "cachekit/schemes.hpp"

#include <algorithm>
#include <map>
#include <random>

#include <json.hpp>

namespace cachekit {

using nlohmann::json;

BitBlock xor_blocks(const BitBlock& a, const BitBlock& b)
{
    if (a.size() != b.size())
        throw DomainError("xor of blocks with different sizes");
    BitBlock out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        out[i] = a[i] ^ b[i];
    return out;
}

std::string to_string(const SubfileId& id)
{
    return "W" + std::to_string(id.file) + "," + std::to_string(id.index);
}

const BitBlock& FileStore::subfile(const SubfileId& id) const
{
    return subfiles.at(id.file - 1).at(id.index);
}

BitBlock FileStore::whole_file(int n) const
{
    BitBlock out;
    out.reserve(file_bits());
    for (const BitBlock& piece : subfiles.at(n - 1))
        out.insert(out.end(), piece.begin(), piece.end());
    return out;
}

FileStore FileStore::random(int n_files, int subpacket_count, int file_bits,
                            std::uint64_t seed)
{
    if (subpacket_count <= 0 || file_bits <= 0 || file_bits % subpacket_count != 0)
        throw DomainError("file_bits=" + std::to_string(file_bits) +
                          " not divisible into " + std::to_string(subpacket_count) +
                          " subfiles");
    FileStore store;
    store.n_files = n_files;
    store.subpacket_count = subpacket_count;
    store.subfile_bits = file_bits / subpacket_count;
    std::mt19937_64 rng(seed);
    store.subfiles.resize(n_files);
    for (int n = 0; n < n_files; ++n) {
        store.subfiles[n].resize(subpacket_count);
        for (int j = 0; j < subpacket_count; ++j) {
            BitBlock block(store.subfile_bits);
            for (auto& bit : block)
                bit = static_cast<std::uint8_t>(rng() & 1u);
            store.subfiles[n][j] = std::move(block);
        }
    }
    return store;
}

long long CacheContents::stored_bits(int user) const
{
    long long total = 0;
    for (const LabeledBlock& block : per_user.at(user - 1))
        total += static_cast<long long>(block.bits.size());
    return total;
}

Rational CacheContents::stored_files(int user, int file_bits) const
{
    return rat(stored_bits(user), file_bits);
}

long long Broadcast::total_bits() const
{
    long long total = 0;
    for (const LabeledBlock& packet : packets)
        total += static_cast<long long>(packet.bits.size());
    return total;
}

Rational Broadcast::rate(int file_bits) const
{
    return rat(total_bits(), file_bits);
}

CacheContents chen_place(const NetworkConfig& cfg, const FileStore& files)
{
    if (files.subpacket_count != cfg.n_users)
        throw DomainError("chen placement needs K subfiles per file");
    CacheContents caches;
    caches.per_user.resize(cfg.n_users);
    for (int k = 1; k <= cfg.n_users; ++k) {
        LabeledBlock block;
        block.bits = files.subfile({1, k - 1});
        block.label = {{1, k - 1}};
        for (int n = 2; n <= cfg.n_files; ++n) {
            block.bits = xor_blocks(block.bits, files.subfile({n, k - 1}));
            block.label.push_back({n, k - 1});
        }
        caches.per_user[k - 1].push_back(std::move(block));
    }
    return caches;
}

Broadcast chen_deliver(const NetworkConfig& cfg, const FileStore& files,
                       const Demand& d)
{
    if (!is_covering(cfg, d))
        throw DomainError("chen delivery requires a covering demand, got (" +
                          to_string(d) + ")");
    Broadcast bc;
    // Raw subfiles W_{n,k} for every n != d_k.
    for (int k = 1; k <= cfg.n_users; ++k)
        for (int n = 1; n <= cfg.n_files; ++n) {
            if (n == d.at(k))
                continue;
            LabeledBlock packet;
            packet.label = {{n, k - 1}};
            packet.bits = files.subfile({n, k - 1});
            bc.packets.push_back(std::move(packet));
        }
    // Pairwise XOR chain within each requester group.
    for (int n = 1; n <= cfg.n_files; ++n) {
        std::vector<int> group;
        for (int k = 1; k <= cfg.n_users; ++k)
            if (d.at(k) == n)
                group.push_back(k);
        for (std::size_t g = 0; g + 1 < group.size(); ++g) {
            SubfileId first{n, group[g] - 1};
            SubfileId second{n, group[g + 1] - 1};
            LabeledBlock packet;
            packet.label = {first, second};
            packet.bits = xor_blocks(files.subfile(first), files.subfile(second));
            bc.packets.push_back(std::move(packet));
        }
    }
    return bc;
}

namespace {

std::vector<std::vector<int>> subsets_of_size(int k, int size)
{
    std::vector<std::vector<int>> out;
    std::vector<int> current;
    auto rec = [&](auto&& self, int next) -> void {
        if (static_cast<int>(current.size()) == size) {
            out.push_back(current);
            return;
        }
        for (int u = next; u <= k; ++u) {
            current.push_back(u);
            self(self, u + 1);
            current.pop_back();
        }
    };
    rec(rec, 1);
    return out;
}

} // namespace

CacheContents mn_place(const NetworkConfig& cfg, int t, const FileStore& files)
{
    if (t < 0 || t > cfg.n_users)
        throw DomainError("placement parameter t outside 0..K");
    Integer packs = binomial(cfg.n_users, t);
    if (Integer(files.subpacket_count) != packs)
        throw DomainError("mn placement needs C(K,t) subfiles per file");
    auto tsets = subsets_of_size(cfg.n_users, t);
    CacheContents caches;
    caches.per_user.resize(cfg.n_users);
    for (int k = 1; k <= cfg.n_users; ++k)
        for (std::size_t idx = 0; idx < tsets.size(); ++idx) {
            if (!std::binary_search(tsets[idx].begin(), tsets[idx].end(), k))
                continue;
            for (int n = 1; n <= cfg.n_files; ++n) {
                LabeledBlock block;
                block.label = {{n, static_cast<int>(idx)}};
                block.bits = files.subfile({n, static_cast<int>(idx)});
                caches.per_user[k - 1].push_back(std::move(block));
            }
        }
    return caches;
}

Broadcast yu_deliver(const NetworkConfig& cfg, int t, const FileStore& files,
                     const Demand& d)
{
    if (t < 0 || t > cfg.n_users)
        throw DomainError("placement parameter t outside 0..K");
    auto tsets = subsets_of_size(cfg.n_users, t);
    std::map<std::vector<int>, int> tset_index;
    for (std::size_t i = 0; i < tsets.size(); ++i)
        tset_index[tsets[i]] = static_cast<int>(i);

    // Leaders: lowest-indexed requester of each distinct requested file.
    std::map<int, int> leader_of_file;
    for (int k = 1; k <= cfg.n_users; ++k)
        if (!leader_of_file.count(d.at(k)))
            leader_of_file[d.at(k)] = k;
    std::vector<int> leaders;
    for (auto& [file, user] : leader_of_file)
        leaders.push_back(user);
    std::sort(leaders.begin(), leaders.end());

    Broadcast bc;
    for (auto& subset : subsets_of_size(cfg.n_users, t + 1)) {
        bool meets_leader = std::any_of(subset.begin(), subset.end(), [&](int u) {
            return std::binary_search(leaders.begin(), leaders.end(), u);
        });
        if (!meets_leader)
            continue;
        LabeledBlock packet;
        for (int k : subset) {
            std::vector<int> rest;
            for (int u : subset)
                if (u != k)
                    rest.push_back(u);
            SubfileId id{d.at(k), tset_index.at(rest)};
            packet.label.push_back(id);
            packet.bits = packet.bits.empty() ? files.subfile(id)
                                              : xor_blocks(packet.bits, files.subfile(id));
        }
        bc.packets.push_back(std::move(packet));
    }
    return bc;
}

namespace {

// RREF over GF(2); each row keeps the block value of its combination.
class Gf2Solver {
public:
    explicit Gf2Solver(int n_symbols, int block_bits)
        : words_((n_symbols + 63) / 64), block_bits_(block_bits)
    {
    }

    void add_equation(const std::vector<int>& symbols, BitBlock value)
    {
        std::vector<std::uint64_t> mask(words_, 0);
        for (int s : symbols)
            mask[s / 64] ^= (1ULL << (s % 64));
        reduce(mask, value);
        int pivot = first_bit(mask);
        if (pivot < 0)
            return; // dependent equation
        rows_.push_back({pivot, std::move(mask), std::move(value)});
        std::sort(rows_.begin(), rows_.end(),
                  [](const Row& a, const Row& b) { return a.pivot < b.pivot; });
        // Back-substitute to keep reduced form.
        for (auto& row : rows_)
            for (auto& other : rows_)
                if (&row != &other && bit_set(row.mask, other.pivot)) {
                    xor_into(row.mask, other.mask);
                    row.value = xor_blocks(row.value, other.value);
                }
    }

    std::optional<BitBlock> solve(int symbol) const
    {
        std::vector<std::uint64_t> mask(words_, 0);
        mask[symbol / 64] ^= (1ULL << (symbol % 64));
        BitBlock value(block_bits_, 0);
        reduce(mask, value);
        if (first_bit(mask) >= 0)
            return std::nullopt;
        return value;
    }

private:
    struct Row {
        int pivot;
        std::vector<std::uint64_t> mask;
        BitBlock value;
    };

    static bool bit_set(const std::vector<std::uint64_t>& mask, int bit)
    {
        return (mask[bit / 64] >> (bit % 64)) & 1ULL;
    }

    static void xor_into(std::vector<std::uint64_t>& dst,
                         const std::vector<std::uint64_t>& src)
    {
        for (std::size_t i = 0; i < dst.size(); ++i)
            dst[i] ^= src[i];
    }

    static int first_bit(const std::vector<std::uint64_t>& mask)
    {
        for (std::size_t w = 0; w < mask.size(); ++w)
            if (mask[w])
                return static_cast<int>(w * 64 + __builtin_ctzll(mask[w]));
        return -1;
    }

    void reduce(std::vector<std::uint64_t>& mask, BitBlock& value) const
    {
        for (const Row& row : rows_) {
            if (!bit_set(mask, row.pivot))
                continue;
            xor_into(mask, row.mask);
            value = xor_blocks(value, row.value);
        }
    }

    int words_;
    int block_bits_;
    std::vector<Row> rows_;
};

} // namespace

DecodeResult decode_file(const FileStore& layout, const std::vector<LabeledBlock>& cache,
                         const Broadcast& broadcast, int n)
{
    const int packs = layout.subpacket_count;
    auto symbol_of = [&](const SubfileId& id) {
        return (id.file - 1) * packs + id.index;
    };
    Gf2Solver solver(layout.n_files * packs, layout.subfile_bits);
    auto feed = [&](const LabeledBlock& block) {
        std::vector<int> symbols;
        symbols.reserve(block.label.size());
        for (const SubfileId& id : block.label)
            symbols.push_back(symbol_of(id));
        solver.add_equation(symbols, block.bits);
    };
    for (const LabeledBlock& block : cache)
        feed(block);
    for (const LabeledBlock& block : broadcast.packets)
        feed(block);

    DecodeResult result;
    result.ok = true;
    result.file.reserve(layout.file_bits());
    for (int j = 0; j < packs; ++j) {
        auto piece = solver.solve(symbol_of({n, j}));
        if (!piece) {
            result.ok = false;
            result.failed_subfiles.push_back(j);
            result.file.insert(result.file.end(), layout.subfile_bits, 0);
            continue;
        }
        result.file.insert(result.file.end(), piece->begin(), piece->end());
    }
    return result;
}

std::string to_string(SchemeKind kind)
{
    return kind == SchemeKind::chen ? "chen" : "yu";
}

Rational chen_rate(const NetworkConfig& cfg)
{
    return rat(cfg.n_files) - rat(cfg.n_files, cfg.n_users);
}

Rational yu_rate(const NetworkConfig& cfg, int t)
{
    return Rational(binomial(cfg.n_users, t + 1) -
                    binomial(cfg.n_users - cfg.n_files, t + 1)) /
           Rational(binomial(cfg.n_users, t));
}

Rational mn_memory(const NetworkConfig& cfg, int t)
{
    return rat(static_cast<long long>(cfg.n_files) * t, cfg.n_users);
}

std::string SimReport::to_json() const
{
    json j;
    j["format_version"] = 1;
    j["n"] = cfg.n_files;
    j["k"] = cfg.n_users;
    j["scheme"] = to_string(scheme);
    if (t)
        j["t"] = *t;
    j["demand"] = to_string(demand);
    j["rate"] = to_string(measured_rate);
    j["decode_ok"] = decode_ok;
    json per_user = json::array();
    for (bool ok : per_user_ok)
        per_user.push_back(ok);
    j["per_user"] = per_user;
    j["covering"] = covering;
    j["file_bits"] = file_bits;
    j["seed"] = seed;
    return j.dump();
}

SimReport simulate(const NetworkConfig& cfg, SchemeKind scheme,
                   std::optional<int> t, const Demand& d, int file_bits,
                   std::uint64_t seed)
{
    if (scheme == SchemeKind::yu && !t)
        throw DomainError("yu scheme requires a placement parameter t");
    int packs = scheme == SchemeKind::chen
                    ? cfg.n_users
                    : static_cast<int>(binomial(cfg.n_users, *t));
    if (file_bits == 0)
        file_bits = packs;
    if (file_bits % packs != 0)
        throw DomainError("file_bits=" + std::to_string(file_bits) +
                          " not divisible by subpacketization " + std::to_string(packs));

    FileStore files = FileStore::random(cfg.n_files, packs, file_bits, seed);
    CacheContents caches;
    Broadcast bc;
    Rational memory;
    if (scheme == SchemeKind::chen) {
        caches = chen_place(cfg, files);
        bc = chen_deliver(cfg, files, d);
        memory = rat(1, cfg.n_users);
    } else {
        caches = mn_place(cfg, *t, files);
        bc = yu_deliver(cfg, *t, files, d);
        memory = mn_memory(cfg, *t);
    }

    for (int k = 1; k <= cfg.n_users; ++k)
        if (caches.stored_files(k, file_bits) > memory)
            throw DomainError("cache budget exceeded for user " + std::to_string(k));

    SimReport report;
    report.cfg = cfg;
    report.scheme = scheme;
    report.t = t;
    report.demand = d;
    report.covering = is_covering(cfg, d);
    report.file_bits = file_bits;
    report.seed = seed;
    report.measured_rate = bc.rate(file_bits);
    report.decode_ok = true;
    for (int k = 1; k <= cfg.n_users; ++k) {
        DecodeResult res = decode_file(files, caches.per_user[k - 1], bc, d.at(k));
        bool ok = res.ok && res.file == files.whole_file(d.at(k));
        report.per_user_ok.push_back(ok);
        report.decode_ok = report.decode_ok && ok;
    }
    return report;
}

std::vector<Demand> all_covering_demands(const NetworkConfig& cfg)
{
    std::vector<Demand> out;
    Demand current;
    current.requests.assign(cfg.n_users, 1);
    while (true) {
        if (is_covering(cfg, current))
            out.push_back(current);
        int pos = cfg.n_users - 1;
        while (pos >= 0 && current.requests[pos] == cfg.n_files) {
            current.requests[pos] = 1;
            --pos;
        }
        if (pos < 0)
            break;
        ++current.requests[pos];
    }
    return out;
}

} // namespace cachekit
