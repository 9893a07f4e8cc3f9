#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ecosim/rng.hpp"

namespace ecosim {

inline constexpr int kAttributeMin = 1;
inline constexpr int kAttributeMax = 100;
inline constexpr int kAgentTuplesMin = 3;
inline constexpr int kAgentTuplesMax = 6;
inline constexpr int kRequestPartsMin = 2;
inline constexpr int kRequestPartsMax = 8;

// Fixed-width text encoding: id and value each rendered as decimal text,
// right-padded with spaces to six characters, eight bits per character.
inline constexpr int kFieldChars = 6;
inline constexpr int kBitsPerChar = 8;
inline constexpr int kBitsPerTuple = 2 * kFieldChars * kBitsPerChar;  // 96

struct AttributeTuple {
    int id = 0;
    int value = 0;

    auto operator<=>(const AttributeTuple&) const = default;
};

// Packed bit string. Bit i of the canonical encoding maps to word i/64,
// bit i%64 (LSB first within a word); within one character the most
// significant bit comes first.
class BitVector {
public:
    BitVector() = default;
    explicit BitVector(std::size_t bits);

    std::size_t size() const { return bits_; }
    bool empty() const { return bits_ == 0; }
    bool test(std::size_t i) const {
        return (words_[i >> 6] >> (i & 63)) & 1u;
    }
    void set(std::size_t i, bool on = true) {
        const std::uint64_t mask = std::uint64_t{1} << (i & 63);
        if (on)
            words_[i >> 6] |= mask;
        else
            words_[i >> 6] &= ~mask;
    }

    // Zero-pads or truncates to the requested width.
    BitVector resized(std::size_t bits) const;

    // Number of differing bits; both vectors must have equal size.
    std::size_t hamming(const BitVector& other) const;

    std::size_t count() const;
    std::vector<std::uint32_t> ones() const;
    const std::vector<std::uint64_t>& words() const { return words_; }

    bool operator==(const BitVector& other) const {
        return bits_ == other.bits_ && words_ == other.words_;
    }

private:
    std::vector<std::uint64_t> words_;
    std::size_t bits_ = 0;
};

// A set of attribute tuples, held sorted ascending by id then value.
// Ids are unique within one description and every field lies in [1, 100];
// construction throws std::invalid_argument naming the offending tuple.
class SemanticDescription {
public:
    SemanticDescription() = default;
    explicit SemanticDescription(std::vector<AttributeTuple> tuples);

    const std::vector<AttributeTuple>& tuples() const { return tuples_; }
    std::size_t size() const { return tuples_.size(); }

    bool operator==(const SemanticDescription&) const = default;

private:
    std::vector<AttributeTuple> tuples_;
};

// Agent descriptions additionally carry between three and six tuples.
bool is_agent_sized(const SemanticDescription& desc);
void require_agent_sized(const SemanticDescription& desc);

struct UserRequest {
    std::vector<SemanticDescription> parts;

    bool operator==(const UserRequest&) const = default;
};

void validate_request(const UserRequest& request);

// Deterministic fixed-width binary encoding of a description,
// |tuples| * 96 bits. Invariant under permutation of the input tuples.
BitVector canonicalize(const SemanticDescription& desc);

// Normalized distance in [0, 1]: ids present on both sides contribute
// min(1, |dv| / 100), ids present on one side contribute 1, and the sum is
// divided by the larger tuple count. Symmetric, zero exactly on equal sets.
double difference(std::span<const AttributeTuple> a, std::span<const AttributeTuple> b);
double difference(const SemanticDescription& a, const SemanticDescription& b);

// Derives a description whose measured difference from `desc` lands within
// +/-0.03 of target_diff (best effort under a bounded retry budget).
SemanticDescription generate_variant(const SemanticDescription& desc, double target_diff,
                                     Rng& rng);

// Concatenation of all parts' tuples, duplicates preserved, part order kept.
std::vector<AttributeTuple> flatten(const UserRequest& request);

// Per-id mean values over the flattened request, sorted by id.
std::vector<AttributeTuple> request_centroid(const UserRequest& request);

// Translates numeric descriptions into readable text. Ids map to labels and
// (id, value) pairs map to value texts; anything unmapped renders as the raw
// number, so rendering never fails.
class FilterMap {
public:
    void set_label(int id, std::string label);
    void set_value_text(int id, int value, std::string text);

    std::string render(const AttributeTuple& tuple) const;
    std::string render(const SemanticDescription& desc) const;
    std::vector<std::string> render(const UserRequest& request) const;

    // Line-oriented format: `id<TAB>Label` or `id,value<TAB>ValueText`.
    static FilterMap load(const std::string& path);

private:
    std::map<int, std::string> labels_;
    std::map<std::pair<int, int>, std::string> value_texts_;
};

// Text forms used by the filter tool: "{(1,25),(2,35)}" for a description and
// "[{...},{...}]" for a request.
SemanticDescription parse_description(const std::string& text);
UserRequest parse_request(const std::string& text);

// Random generators used by tests and the simulator's user-base model.
SemanticDescription random_agent_description(Rng& rng, int id_max = kAttributeMax);
UserRequest random_request(Rng& rng, int id_max = kAttributeMax);

}  // namespace ecosim
