#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace cgems::sim {

struct MatchBlock {
    std::size_t a = 0;
    std::size_t b = 0;
    std::size_t size = 0;
    bool operator==(const MatchBlock&) const = default;
};

enum class OpTag { equal, replace, remove, insert };

struct Opcode {
    OpTag tag;
    std::size_t a_begin, a_end, b_begin, b_end;
};

/// Ratcliff/Obershelp matcher with the same longest-block search, tie breaking and
/// "popular element" heuristic (autojunk) as Python's difflib.SequenceMatcher, so that
/// ratios agree with that library to the last bit on the same element sequences.
template <class T, class Hash = std::hash<T>>
class SequenceMatcher {
public:
    SequenceMatcher(std::vector<T> a, std::vector<T> b, bool autojunk = true)
        : a_(std::move(a)), b_(std::move(b)) {
        index_b(autojunk);
    }

    MatchBlock find_longest_match(std::size_t alo, std::size_t ahi, std::size_t blo, std::size_t bhi) const {
        std::size_t besti = alo, bestj = blo, bestsize = 0;
        // j2len[j + 1] holds the length of the match ending at a[i-1], b[j]; row swapped each i.
        std::vector<std::size_t> prev(b_.size() + 1, 0), next(b_.size() + 1, 0);
        std::vector<std::size_t> touched_prev, touched_next;
        for (std::size_t i = alo; i < ahi; ++i) {
            auto it = b2j_.find(a_[i]);
            if (it != b2j_.end()) {
                for (std::size_t j : it->second) {
                    if (j < blo)
                        continue;
                    if (j >= bhi)
                        break;
                    std::size_t k = prev[j] + 1;  // prev[j] is the length ending at b[j-1]
                    next[j + 1] = k;
                    touched_next.push_back(j + 1);
                    if (k > bestsize) {
                        besti = i + 1 - k;
                        bestj = j + 1 - k;
                        bestsize = k;
                    }
                }
            }
            for (std::size_t idx : touched_prev)
                prev[idx] = 0;
            touched_prev.clear();
            std::swap(prev, next);
            std::swap(touched_prev, touched_next);
        }
        // Popular elements were left out of b2j; extend the match over equal neighbours.
        while (besti > alo && bestj > blo && a_[besti - 1] == b_[bestj - 1]) {
            --besti;
            --bestj;
            ++bestsize;
        }
        while (besti + bestsize < ahi && bestj + bestsize < bhi && a_[besti + bestsize] == b_[bestj + bestsize])
            ++bestsize;
        return {besti, bestj, bestsize};
    }

    const std::vector<MatchBlock>& matching_blocks() const {
        if (blocks_computed_)
            return blocks_;
        std::vector<std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>> queue{
            {0, a_.size(), 0, b_.size()}};
        std::vector<MatchBlock> raw;
        while (!queue.empty()) {
            auto [alo, ahi, blo, bhi] = queue.back();
            queue.pop_back();
            MatchBlock m = find_longest_match(alo, ahi, blo, bhi);
            if (m.size) {
                raw.push_back(m);
                if (alo < m.a && blo < m.b)
                    queue.emplace_back(alo, m.a, blo, m.b);
                if (m.a + m.size < ahi && m.b + m.size < bhi)
                    queue.emplace_back(m.a + m.size, ahi, m.b + m.size, bhi);
            }
        }
        std::sort(raw.begin(), raw.end(),
                  [](const MatchBlock& x, const MatchBlock& y) { return std::tie(x.a, x.b, x.size) < std::tie(y.a, y.b, y.size); });
        MatchBlock cur{};
        for (const auto& m : raw) {
            if (cur.a + cur.size == m.a && cur.b + cur.size == m.b) {
                cur.size += m.size;
            } else {
                if (cur.size)
                    blocks_.push_back(cur);
                cur = m;
            }
        }
        if (cur.size)
            blocks_.push_back(cur);
        blocks_.push_back({a_.size(), b_.size(), 0});
        blocks_computed_ = true;
        return blocks_;
    }

    std::vector<Opcode> opcodes() const {
        std::vector<Opcode> out;
        std::size_t i = 0, j = 0;
        for (const auto& m : matching_blocks()) {
            if (i < m.a && j < m.b)
                out.push_back({OpTag::replace, i, m.a, j, m.b});
            else if (i < m.a)
                out.push_back({OpTag::remove, i, m.a, j, m.b});
            else if (j < m.b)
                out.push_back({OpTag::insert, i, m.a, j, m.b});
            i = m.a + m.size;
            j = m.b + m.size;
            if (m.size)
                out.push_back({OpTag::equal, m.a, i, m.b, j});
        }
        return out;
    }

    std::size_t matches() const {
        std::size_t total = 0;
        for (const auto& m : matching_blocks())
            total += m.size;
        return total;
    }

    double ratio() const {
        std::size_t len = a_.size() + b_.size();
        return len ? 2.0 * static_cast<double>(matches()) / static_cast<double>(len) : 1.0;
    }

private:
    void index_b(bool autojunk) {
        for (std::size_t j = 0; j < b_.size(); ++j)
            b2j_[b_[j]].push_back(j);
        const std::size_t n = b_.size();
        if (autojunk && n >= 200) {
            const std::size_t ntest = n / 100 + 1;
            for (auto it = b2j_.begin(); it != b2j_.end();) {
                if (it->second.size() > ntest)
                    it = b2j_.erase(it);
                else
                    ++it;
            }
        }
    }

    std::vector<T> a_;
    std::vector<T> b_;
    std::unordered_map<T, std::vector<std::size_t>, Hash> b2j_;
    mutable std::vector<MatchBlock> blocks_;
    mutable bool blocks_computed_ = false;
};

}  // namespace cgems::sim
