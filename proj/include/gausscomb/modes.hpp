#pragma once

#include <algorithm>
#include <cstdlib>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace gausscomb {

/// Frequency label of a mode. `frequency` is the signed odd grid index
/// (..., -3, -1, 1, 3, ...). `layer` is 0 for system modes and k >= 3 for the
/// idler partner created by asymmetric pump k.
struct ModeLabel {
    int frequency = 1;
    int layer = 0;

    friend bool operator==(const ModeLabel&, const ModeLabel&) = default;
};

inline std::string to_string(const ModeLabel& m) {
    std::string s = std::to_string(m.frequency);
    if (m.layer != 0) s += "@" + std::to_string(m.layer);
    return s;
}

inline ModeLabel parse_mode_label(const std::string& text) {
    auto at = text.find('@');
    std::size_t pos = 0;
    ModeLabel m;
    try {
        m.frequency = std::stoi(text.substr(0, at), &pos);
        if (pos != (at == std::string::npos ? text.size() : at))
            throw std::invalid_argument("trailing characters");
        if (at != std::string::npos) {
            m.layer = std::stoi(text.substr(at + 1), &pos);
            if (pos != text.size() - at - 1) throw std::invalid_argument("trailing characters");
        }
    } catch (const std::exception&) {
        throw std::invalid_argument("malformed mode label '" + text + "'");
    }
    return m;
}

/// Ordered basis of modes. Mode at position i owns quadrature slots
/// (2i, 2i+1) = (x, p).
class ModeSet {
public:
    ModeSet() = default;

    explicit ModeSet(std::vector<ModeLabel> labels) : labels_(std::move(labels)) {
        index_.reserve(labels_.size());
        for (std::size_t i = 0; i < labels_.size(); ++i) {
            const auto& m = labels_[i];
            if (m.frequency % 2 == 0)
                throw std::invalid_argument("mode label " + gausscomb::to_string(m) + " is not odd");
            if (!index_.emplace(key(m), i).second)
                throw std::invalid_argument("duplicate mode label " + gausscomb::to_string(m));
        }
    }

    /// Plain odd labels, kept in the given order.
    static ModeSet from_frequencies(const std::vector<int>& freqs) {
        std::vector<ModeLabel> labels;
        labels.reserve(freqs.size());
        for (int f : freqs) labels.push_back({f, 0});
        return ModeSet(std::move(labels));
    }

    /// Labels ±1, ±3, ..., ±max_label in basis order (-1, 1, -3, 3, ...).
    static ModeSet symmetric(int max_label) {
        if (max_label < 1 || max_label % 2 == 0)
            throw std::invalid_argument("symmetric mode set needs a positive odd bound");
        std::vector<ModeLabel> labels;
        for (int k = 1; k <= max_label; k += 2) {
            labels.push_back({-k, 0});
            labels.push_back({k, 0});
        }
        return ModeSet(std::move(labels));
    }

    std::size_t size() const noexcept { return labels_.size(); }
    std::size_t dimension() const noexcept { return 2 * labels_.size(); }
    bool empty() const noexcept { return labels_.empty(); }

    const ModeLabel& operator[](std::size_t i) const { return labels_[i]; }
    const std::vector<ModeLabel>& labels() const noexcept { return labels_; }
    auto begin() const noexcept { return labels_.begin(); }
    auto end() const noexcept { return labels_.end(); }

    std::optional<std::size_t> find(const ModeLabel& m) const {
        auto it = index_.find(key(m));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }
    std::optional<std::size_t> find(int frequency) const { return find(ModeLabel{frequency, 0}); }

    bool contains(const ModeLabel& m) const { return find(m).has_value(); }
    bool contains(int frequency) const { return find(frequency).has_value(); }

    std::size_t position(const ModeLabel& m) const {
        auto i = find(m);
        if (!i) throw std::out_of_range("unknown mode label " + gausscomb::to_string(m));
        return *i;
    }
    std::size_t position(int frequency) const { return position(ModeLabel{frequency, 0}); }

    /// Largest |frequency| among layer-0 modes.
    int max_abs_frequency() const {
        int m = 0;
        for (const auto& l : labels_)
            if (l.layer == 0) m = std::max(m, std::abs(l.frequency));
        return m;
    }

    std::string to_string() const {
        std::string s;
        for (std::size_t i = 0; i < labels_.size(); ++i) {
            if (i) s += ',';
            s += gausscomb::to_string(labels_[i]);
        }
        return s;
    }

    friend bool operator==(const ModeSet& a, const ModeSet& b) { return a.labels_ == b.labels_; }

private:
    static long long key(const ModeLabel& m) {
        return (static_cast<long long>(m.layer) << 32) ^ static_cast<unsigned int>(m.frequency);
    }

    std::vector<ModeLabel> labels_;
    std::unordered_map<long long, std::size_t> index_;
};

}  // namespace gausscomb
