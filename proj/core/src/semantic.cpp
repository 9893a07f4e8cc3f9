#include "ecosim/semantic.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace ecosim {

namespace {

std::string tuple_text(const AttributeTuple& t) {
    return "(" + std::to_string(t.id) + "," + std::to_string(t.value) + ")";
}

void check_tuple(const AttributeTuple& t) {
    if (t.id < kAttributeMin || t.id > kAttributeMax || t.value < kAttributeMin ||
        t.value > kAttributeMax) {
        throw std::invalid_argument("attribute tuple " + tuple_text(t) +
                                    " outside [1,100]x[1,100]");
    }
}

}  // namespace

BitVector::BitVector(std::size_t bits) : words_((bits + 63) / 64, 0), bits_(bits) {}

BitVector BitVector::resized(std::size_t bits) const {
    BitVector out(bits);
    const std::size_t words = std::min(out.words_.size(), words_.size());
    std::copy_n(words_.begin(), words, out.words_.begin());
    if (bits < bits_ && (bits & 63) != 0) {
        out.words_.back() &= (std::uint64_t{1} << (bits & 63)) - 1;
    }
    return out;
}

std::size_t BitVector::hamming(const BitVector& other) const {
    if (bits_ != other.bits_) {
        throw std::invalid_argument("bit vector length mismatch: " + std::to_string(bits_) +
                                    " vs " + std::to_string(other.bits_));
    }
    std::size_t distance = 0;
    for (std::size_t w = 0; w < words_.size(); ++w) {
        distance += static_cast<std::size_t>(std::popcount(words_[w] ^ other.words_[w]));
    }
    return distance;
}

std::size_t BitVector::count() const {
    std::size_t n = 0;
    for (std::uint64_t w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
}

std::vector<std::uint32_t> BitVector::ones() const {
    std::vector<std::uint32_t> out;
    out.reserve(count());
    for (std::size_t w = 0; w < words_.size(); ++w) {
        std::uint64_t word = words_[w];
        while (word != 0) {
            const int bit = std::countr_zero(word);
            out.push_back(static_cast<std::uint32_t>(w * 64 + static_cast<std::size_t>(bit)));
            word &= word - 1;
        }
    }
    return out;
}

SemanticDescription::SemanticDescription(std::vector<AttributeTuple> tuples)
    : tuples_(std::move(tuples)) {
    if (tuples_.empty()) {
        throw std::invalid_argument("semantic description must contain at least one tuple");
    }
    for (const auto& t : tuples_) check_tuple(t);
    std::sort(tuples_.begin(), tuples_.end());
    for (std::size_t i = 1; i < tuples_.size(); ++i) {
        if (tuples_[i].id == tuples_[i - 1].id) {
            throw std::invalid_argument("duplicate attribute id in description: " +
                                        tuple_text(tuples_[i]));
        }
    }
}

bool is_agent_sized(const SemanticDescription& desc) {
    return desc.size() >= kAgentTuplesMin && desc.size() <= kAgentTuplesMax;
}

void require_agent_sized(const SemanticDescription& desc) {
    if (!is_agent_sized(desc)) {
        throw std::invalid_argument("agent description must carry 3..6 tuples, got " +
                                    std::to_string(desc.size()));
    }
}

void validate_request(const UserRequest& request) {
    if (request.parts.empty()) {
        throw std::invalid_argument("user request must contain at least one part");
    }
    for (const auto& part : request.parts) {
        if (part.size() == 0) {
            throw std::invalid_argument("user request part must not be empty");
        }
    }
}

BitVector canonicalize(const SemanticDescription& desc) {
    if (desc.size() == 0) {
        throw std::invalid_argument("cannot encode an empty semantic description");
    }
    BitVector bits(desc.size() * kBitsPerTuple);
    std::size_t cursor = 0;
    auto put_field = [&](int number) {
        char text[kFieldChars];
        std::fill_n(text, kFieldChars, ' ');
        // Decimal digits first, spaces pad to the right.
        char digits[8];
        int n = 0;
        int v = number;
        do {
            digits[n++] = static_cast<char>('0' + v % 10);
            v /= 10;
        } while (v != 0);
        for (int i = 0; i < n && i < kFieldChars; ++i) text[i] = digits[n - 1 - i];
        for (int c = 0; c < kFieldChars; ++c) {
            const auto byte = static_cast<unsigned char>(text[c]);
            for (int b = 0; b < kBitsPerChar; ++b) {
                // Most significant bit of each character first.
                if ((byte >> (kBitsPerChar - 1 - b)) & 1) bits.set(cursor + b);
            }
            cursor += kBitsPerChar;
        }
    };
    for (const auto& t : desc.tuples()) {
        check_tuple(t);
        put_field(t.id);
        put_field(t.value);
    }
    return bits;
}

double difference(std::span<const AttributeTuple> a, std::span<const AttributeTuple> b) {
    if (a.empty() && b.empty()) return 0.0;
    double matched_sum = 0.0;
    std::size_t matched = 0;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i].id == b[j].id) {
            matched_sum += std::min(1.0, std::abs(a[i].value - b[j].value) / 100.0);
            ++matched;
            ++i;
            ++j;
        } else if (a[i].id < b[j].id) {
            ++i;
        } else {
            ++j;
        }
    }
    // Ids without a counterpart fill the remaining slots of the larger side
    // at full distance, so fully disjoint equal-size sets measure exactly 1.
    const double larger = static_cast<double>(std::max(a.size(), b.size()));
    return (matched_sum + (larger - static_cast<double>(matched))) / larger;
}

double difference(const SemanticDescription& a, const SemanticDescription& b) {
    return difference(std::span<const AttributeTuple>(a.tuples()),
                      std::span<const AttributeTuple>(b.tuples()));
}

SemanticDescription generate_variant(const SemanticDescription& desc, double target_diff,
                                     Rng& rng) {
    if (target_diff <= 0.0) return desc;
    const auto& base = desc.tuples();
    const auto n = base.size();

    auto propose = [&]() {
        std::vector<AttributeTuple> tuples = base;
        // target * n = id replacements (1 each) + value shifts (|dv|/100 each).
        const double budget = target_diff * static_cast<double>(n);
        int replacements = static_cast<int>(budget);
        double value_budget = (budget - replacements) * 100.0;

        std::unordered_set<int> used;
        for (const auto& t : base) used.insert(t.id);

        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        rng.shuffle(order.begin(), order.end());

        std::size_t k = 0;
        for (; k < order.size() && replacements > 0; ++k, --replacements) {
            int fresh = rng.range(kAttributeMin, kAttributeMax);
            int guard = 0;
            while (used.count(fresh) != 0 && guard++ < 512) {
                fresh = rng.range(kAttributeMin, kAttributeMax);
            }
            used.insert(fresh);
            tuples[order[k]] = {fresh, rng.range(kAttributeMin, kAttributeMax)};
        }
        for (; k < order.size() && value_budget > 0.5; ++k) {
            auto& t = tuples[order[k]];
            const int shift = std::min(99, static_cast<int>(std::lround(value_budget)));
            const int sign = rng.chance(0.5) ? 1 : -1;
            int moved = t.value + sign * shift;
            if (moved < kAttributeMin || moved > kAttributeMax) moved = t.value - sign * shift;
            moved = std::clamp(moved, kAttributeMin, kAttributeMax);
            value_budget -= std::abs(moved - t.value);
            t.value = moved;
        }
        return SemanticDescription(std::move(tuples));
    };

    constexpr int kRetries = 64;
    constexpr double kTolerance = 0.03;
    SemanticDescription best = propose();
    double best_error = std::abs(difference(desc, best) - target_diff);
    for (int attempt = 1; attempt < kRetries && best_error > kTolerance; ++attempt) {
        SemanticDescription candidate = propose();
        const double error = std::abs(difference(desc, candidate) - target_diff);
        if (error < best_error) {
            best = std::move(candidate);
            best_error = error;
        }
    }
    return best;
}

std::vector<AttributeTuple> flatten(const UserRequest& request) {
    validate_request(request);
    std::vector<AttributeTuple> out;
    for (const auto& part : request.parts) {
        out.insert(out.end(), part.tuples().begin(), part.tuples().end());
    }
    return out;
}

std::vector<AttributeTuple> request_centroid(const UserRequest& request) {
    std::map<int, std::pair<long, long>> sums;  // id -> (sum, count)
    for (const auto& tuple : flatten(request)) {
        auto& slot = sums[tuple.id];
        slot.first += tuple.value;
        slot.second += 1;
    }
    std::vector<AttributeTuple> out;
    out.reserve(sums.size());
    for (const auto& [id, sum] : sums) {
        const int mean = static_cast<int>((sum.first + sum.second / 2) / sum.second);
        out.push_back({id, std::clamp(mean, kAttributeMin, kAttributeMax)});
    }
    return out;
}

void FilterMap::set_label(int id, std::string label) { labels_[id] = std::move(label); }

void FilterMap::set_value_text(int id, int value, std::string text) {
    value_texts_[{id, value}] = std::move(text);
}

std::string FilterMap::render(const AttributeTuple& tuple) const {
    const auto label = labels_.find(tuple.id);
    const auto value = value_texts_.find({tuple.id, tuple.value});
    std::string out = "(";
    out += label != labels_.end() ? label->second : std::to_string(tuple.id);
    out += ", ";
    out += value != value_texts_.end() ? value->second : std::to_string(tuple.value);
    out += ")";
    return out;
}

std::string FilterMap::render(const SemanticDescription& desc) const {
    std::string out = "{";
    for (std::size_t i = 0; i < desc.tuples().size(); ++i) {
        if (i != 0) out += ", ";
        out += render(desc.tuples()[i]);
    }
    out += "}";
    return out;
}

std::vector<std::string> FilterMap::render(const UserRequest& request) const {
    std::vector<std::string> lines;
    lines.reserve(request.parts.size());
    for (const auto& part : request.parts) lines.push_back(render(part));
    return lines;
}

FilterMap FilterMap::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open filter map: " + path);
    FilterMap map;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) {
            throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                        ": expected `key<TAB>text`");
        }
        const std::string key = line.substr(0, tab);
        const std::string text = line.substr(tab + 1);
        try {
            const auto comma = key.find(',');
            if (comma == std::string::npos) {
                map.set_label(std::stoi(key), text);
            } else {
                map.set_value_text(std::stoi(key.substr(0, comma)),
                                   std::stoi(key.substr(comma + 1)), text);
            }
        } catch (const std::exception&) {
            throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                        ": malformed key `" + key + "`");
        }
    }
    return map;
}

namespace {

struct Cursor {
    const std::string& text;
    std::size_t pos = 0;

    void skip_space() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    bool accept(char c) {
        skip_space();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!accept(c)) {
            throw std::invalid_argument("expected `" + std::string(1, c) + "` at offset " +
                                        std::to_string(pos) + " in `" + text + "`");
        }
    }
    int number() {
        skip_space();
        std::size_t end = pos;
        while (end < text.size() && std::isdigit(static_cast<unsigned char>(text[end]))) ++end;
        if (end == pos) {
            throw std::invalid_argument("expected number at offset " + std::to_string(pos) +
                                        " in `" + text + "`");
        }
        const int value = std::stoi(text.substr(pos, end - pos));
        pos = end;
        return value;
    }
};

SemanticDescription parse_group(Cursor& cur) {
    cur.expect('{');
    std::vector<AttributeTuple> tuples;
    if (!cur.accept('}')) {
        do {
            cur.expect('(');
            const int id = cur.number();
            cur.expect(',');
            const int value = cur.number();
            cur.expect(')');
            tuples.push_back({id, value});
        } while (cur.accept(','));
        cur.expect('}');
    }
    return SemanticDescription(std::move(tuples));
}

}  // namespace

SemanticDescription parse_description(const std::string& text) {
    Cursor cur{text};
    auto desc = parse_group(cur);
    cur.skip_space();
    if (cur.pos != text.size()) {
        throw std::invalid_argument("trailing characters in description: `" + text + "`");
    }
    return desc;
}

UserRequest parse_request(const std::string& text) {
    Cursor cur{text};
    cur.expect('[');
    UserRequest request;
    if (!cur.accept(']')) {
        do {
            request.parts.push_back(parse_group(cur));
        } while (cur.accept(','));
        cur.expect(']');
    }
    cur.skip_space();
    if (cur.pos != text.size()) {
        throw std::invalid_argument("trailing characters in request: `" + text + "`");
    }
    validate_request(request);
    return request;
}

SemanticDescription random_agent_description(Rng& rng, int id_max) {
    const int n = rng.range(kAgentTuplesMin, kAgentTuplesMax);
    std::vector<int> ids(static_cast<std::size_t>(id_max));
    for (int i = 0; i < id_max; ++i) ids[static_cast<std::size_t>(i)] = i + 1;
    rng.shuffle(ids.begin(), ids.end());
    std::vector<AttributeTuple> tuples;
    tuples.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        tuples.push_back({ids[static_cast<std::size_t>(i)],
                          rng.range(kAttributeMin, kAttributeMax)});
    }
    return SemanticDescription(std::move(tuples));
}

UserRequest random_request(Rng& rng, int id_max) {
    const int parts = rng.range(kRequestPartsMin, kRequestPartsMax);
    UserRequest request;
    request.parts.reserve(static_cast<std::size_t>(parts));
    for (int p = 0; p < parts; ++p) {
        request.parts.push_back(random_agent_description(rng, id_max));
    }
    return request;
}

}  // namespace ecosim
