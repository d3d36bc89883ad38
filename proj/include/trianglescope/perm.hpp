#pragma once

#include <algorithm>
#include <array>
#include <numeric>
#include <vector>

namespace tri {

/// All permutations of {0..n-1} in lexicographic order.
inline std::vector<std::vector<int>> all_permutations(int n) {
    std::vector<int> p(n);
    std::iota(p.begin(), p.end(), 0);
    std::vector<std::vector<int>> out;
    do {
        out.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

/// Transposition (0 j) on {0..n-1}.
inline std::vector<int> transposition(int n, int j) {
    std::vector<int> t(n);
    std::iota(t.begin(), t.end(), 0);
    std::swap(t[0], t[j]);
    return t;
}

/// Permutation with pi(0)=j, pi(1)=k, remaining values in ascending order on
/// the remaining positions.
inline std::vector<int> pair_completion(int n, int j, int k) {
    std::vector<int> pi(n, -1);
    pi[0] = j;
    pi[1] = k;
    std::vector<int> rest;
    for (int v = 0; v < n; v++)
        if (v != j && v != k) rest.push_back(v);
    for (int i = 2; i < n; i++) pi[i] = rest[i - 2];
    return pi;
}

inline std::vector<int> inverse(std::vector<int> const& p) {
    std::vector<int> inv(p.size());
    for (size_t i = 0; i < p.size(); i++) inv[p[i]] = static_cast<int>(i);
    return inv;
}

}  // namespace tri
