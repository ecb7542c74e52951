/**
 * @file stopping_rule.hpp
 * @brief Node sets, stopping rules (first hit of a marked node) and
 *        path addressing on the recombining lattice.
 */

#ifndef NLGAME_STOPPING_RULE_HPP
#define NLGAME_STOPPING_RULE_HPP

#include "nlgame/errors.hpp"
#include "nlgame/model_core.hpp"

#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace nlgame {

/// Path through the lattice encoded as bits: bit k set means an up move at step k.
using PathId = std::uint64_t;

/// Up-count at step k on a path.
inline std::size_t path_up_count(PathId path, std::size_t k) noexcept {
    const PathId mask = k >= 64 ? ~PathId{0} : ((PathId{1} << k) - 1);
    return static_cast<std::size_t>(std::popcount(path & mask));
}

/// Boolean marking of lattice nodes.
class NodeSet {
public:
    NodeSet() = default;
    explicit NodeSet(std::size_t steps, bool fill = false) : steps_(steps), marks_(node_count(steps), fill ? 1 : 0) {}

    std::size_t steps() const noexcept { return steps_; }
    std::size_t size() const noexcept { return marks_.size(); }

    bool contains(std::size_t k, std::size_t j) const noexcept { return marks_[node_index(k, j)] != 0; }
    bool contains_index(std::size_t i) const noexcept { return marks_[i] != 0; }
    void set(std::size_t k, std::size_t j, bool on = true) noexcept { marks_[node_index(k, j)] = on ? 1 : 0; }
    void set_index(std::size_t i, bool on = true) noexcept { marks_[i] = on ? 1 : 0; }

    std::size_t count() const noexcept {
        std::size_t n = 0;
        for (auto m : marks_) n += m;
        return n;
    }

    friend bool operator==(const NodeSet&, const NodeSet&) = default;

private:
    std::size_t steps_ = 0;
    std::vector<std::uint8_t> marks_;
};

/**
 * A stopping time realized as the first marked node along a path. The
 * terminal row is always marked, so every path stops by T (inf of the empty
 * set is T).
 */
class StoppingRule {
public:
    StoppingRule() = default;

    /// Rule that stops only at T.
    explicit StoppingRule(std::size_t steps) : marks_(steps) {
        for (std::size_t j = 0; j <= steps; ++j) marks_.set(steps, j);
    }

    /// First hit of the region, with the terminal row added.
    static StoppingRule first_hit(const NodeSet& region) {
        StoppingRule r;
        r.marks_ = region;
        for (std::size_t j = 0; j <= region.steps(); ++j) r.marks_.set(region.steps(), j);
        return r;
    }

    /// Wraps a marking verbatim; throws unless the terminal row is fully marked.
    static StoppingRule from_marks(const NodeSet& marks) {
        StoppingRule r;
        r.marks_ = marks;
        r.validate();
        return r;
    }

    /// Rule marking exactly the interior nodes whose bits are set in `bits`
    /// (bit i <-> flattened interior node i), plus the terminal row.
    static StoppingRule from_bits(std::size_t steps, std::uint64_t bits) {
        StoppingRule r(steps);
        const std::size_t interior = node_count(steps) - (steps + 1);
        for (std::size_t i = 0; i < interior; ++i)
            if ((bits >> i) & 1U) r.marks_.set_index(i);
        return r;
    }

    void validate() const {
        const std::size_t n = marks_.steps();
        for (std::size_t j = 0; j <= n; ++j)
            if (!marks_.contains(n, j))
                throw Error(ErrorKind::InvalidStoppingRule,
                            "terminal node (" + std::to_string(n) + "," + std::to_string(j) + ") is not marked");
    }

    std::size_t steps() const noexcept { return marks_.steps(); }
    bool stops_at(std::size_t k, std::size_t j) const noexcept { return marks_.contains(k, j); }
    bool stops_at_index(std::size_t i) const noexcept { return marks_.contains_index(i); }
    const NodeSet& marks() const noexcept { return marks_; }

    /// Number of marked interior nodes.
    std::size_t interior_count() const noexcept { return marks_.count() - (steps() + 1); }

    /// Stopping step along a path.
    std::size_t stop_step(PathId path) const noexcept {
        const std::size_t n = steps();
        for (std::size_t k = 0; k < n; ++k)
            if (marks_.contains(k, path_up_count(path, k))) return k;
        return n;
    }

    friend bool operator==(const StoppingRule&, const StoppingRule&) = default;

private:
    NodeSet marks_;
};

}  // namespace nlgame

#endif  // NLGAME_STOPPING_RULE_HPP
