#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cachekit/network.hpp"
#include "cachekit/rational.hpp"

namespace cachekit {

// One bit per entry; desk-scale files make the flat layout the simple choice.
using BitBlock = std::vector<std::uint8_t>;

BitBlock xor_blocks(const BitBlock& a, const BitBlock& b);

// Subfile (n, j): file n in 1..N, subfile index j in 0..subpacket_count-1.
struct SubfileId {
    int file = 0;
    int index = 0;
    bool operator==(const SubfileId&) const = default;
    auto operator<=>(const SubfileId&) const = default;
};

std::string to_string(const SubfileId& id);

// A stored or transmitted block together with the XOR combination it holds.
struct LabeledBlock {
    std::vector<SubfileId> label;
    BitBlock bits;
};

struct FileStore {
    int n_files = 0;
    int subpacket_count = 0;
    int subfile_bits = 0;
    // subfiles[n-1][j]
    std::vector<std::vector<BitBlock>> subfiles;

    int file_bits() const { return subpacket_count * subfile_bits; }
    const BitBlock& subfile(const SubfileId& id) const;
    BitBlock whole_file(int n) const;

    // Uniformly random bits, deterministic in the seed.
    static FileStore random(int n_files, int subpacket_count, int file_bits,
                            std::uint64_t seed);
};

struct CacheContents {
    std::vector<std::vector<LabeledBlock>> per_user;

    long long stored_bits(int user) const; // 1-based user
    // Stored size in units of one file.
    Rational stored_files(int user, int file_bits) const;
};

struct Broadcast {
    std::vector<LabeledBlock> packets;

    long long total_bits() const;
    Rational rate(int file_bits) const;
};

// Coded placement at M = 1/K: file n splits into K subfiles W_{n,j}; user k
// stores the single XOR over n of W_{n,k}.
CacheContents chen_place(const NetworkConfig& cfg, const FileStore& files);

// For covering demands: every raw subfile W_{n,k} with n != d_k, plus the
// XOR chain over each file's requester group. Rate is exactly N - N/K.
Broadcast chen_deliver(const NetworkConfig& cfg, const FileStore& files,
                       const Demand& d);

// Uncoded placement with parameter t: subfiles indexed by t-subsets of [K];
// user k stores W_{n,T} for every T containing k. M = Nt/K.
CacheContents mn_place(const NetworkConfig& cfg, int t, const FileStore& files);

// Leader-based delivery: one packet per (t+1)-subset meeting the leader set
// (lowest-indexed requester per distinct file).
Broadcast yu_deliver(const NetworkConfig& cfg, int t, const FileStore& files,
                     const Demand& d);

struct DecodeResult {
    bool ok = false;
    BitBlock file;                 // reconstructed bits when ok
    std::vector<int> failed_subfiles;
};

// Reconstructs file `n` for a user from their cache and the broadcast by
// GF(2) elimination over the labelled blocks. Works for any scheme whose
// blocks are XORs of whole subfiles.
DecodeResult decode_file(const FileStore& layout_reference,
                         const std::vector<LabeledBlock>& cache,
                         const Broadcast& broadcast, int n);

enum class SchemeKind { chen, yu };

std::string to_string(SchemeKind kind);

struct SimReport {
    NetworkConfig cfg;
    SchemeKind scheme = SchemeKind::chen;
    std::optional<int> t;
    Demand demand;
    Rational measured_rate;
    bool decode_ok = false;
    std::vector<bool> per_user_ok;
    bool covering = true;
    int file_bits = 0;
    std::uint64_t seed = 0;

    std::string to_json() const;
};

// Places, delivers and decodes every user; file_bits of 0 selects the
// minimal valid subpacketization for the scheme.
SimReport simulate(const NetworkConfig& cfg, SchemeKind scheme,
                   std::optional<int> t, const Demand& d, int file_bits,
                   std::uint64_t seed);

// Closed forms used as cross-checks against the measured rates.
Rational chen_rate(const NetworkConfig& cfg);
Rational yu_rate(const NetworkConfig& cfg, int t);
Rational mn_memory(const NetworkConfig& cfg, int t);

// Every covering demand of cfg, in lexicographic order.
std::vector<Demand> all_covering_demands(const NetworkConfig& cfg);

} // namespace cachekit
