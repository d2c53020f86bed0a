#pragma once

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <iterator>
#include <vector>

namespace skm {

// Sorted set of small non-negative indices (species or reactions).
class IndexSet {
public:
    using value_type = int;
    using const_iterator = std::vector<int>::const_iterator;

    IndexSet() = default;
    IndexSet(std::initializer_list<int> items) : items_(items) { normalize(); }
    explicit IndexSet(std::vector<int> items) : items_(std::move(items)) { normalize(); }

    static IndexSet range(int n) {
        IndexSet s;
        s.items_.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) s.items_[static_cast<std::size_t>(i)] = i;
        return s;
    }

    bool contains(int i) const { return std::binary_search(items_.begin(), items_.end(), i); }

    void insert(int i) {
        auto it = std::lower_bound(items_.begin(), items_.end(), i);
        if (it == items_.end() || *it != i) items_.insert(it, i);
    }

    void erase(int i) {
        auto it = std::lower_bound(items_.begin(), items_.end(), i);
        if (it != items_.end() && *it == i) items_.erase(it);
    }

    std::size_t size() const { return items_.size(); }
    bool empty() const { return items_.empty(); }
    const_iterator begin() const { return items_.begin(); }
    const_iterator end() const { return items_.end(); }
    int front() const { return items_.front(); }
    const std::vector<int>& items() const { return items_; }

    bool is_subset_of(const IndexSet& other) const {
        return std::includes(other.items_.begin(), other.items_.end(), items_.begin(), items_.end());
    }

    bool intersects(const IndexSet& other) const {
        auto a = items_.begin();
        auto b = other.items_.begin();
        while (a != items_.end() && b != other.items_.end()) {
            if (*a == *b) return true;
            if (*a < *b) ++a; else ++b;
        }
        return false;
    }

    friend IndexSet operator|(const IndexSet& a, const IndexSet& b) {
        IndexSet r;
        std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(r.items_));
        return r;
    }
    friend IndexSet operator&(const IndexSet& a, const IndexSet& b) {
        IndexSet r;
        std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(r.items_));
        return r;
    }
    friend IndexSet operator-(const IndexSet& a, const IndexSet& b) {
        IndexSet r;
        std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(r.items_));
        return r;
    }
    IndexSet& operator|=(const IndexSet& o) { return *this = *this | o; }

    friend bool operator==(const IndexSet&, const IndexSet&) = default;
    friend auto operator<=>(const IndexSet&, const IndexSet&) = default;

private:
    void normalize() {
        std::sort(items_.begin(), items_.end());
        items_.erase(std::unique(items_.begin(), items_.end()), items_.end());
    }

    std::vector<int> items_;
};

using SpeciesSet = IndexSet;
using ReactionSet = IndexSet;

}  // namespace skm
