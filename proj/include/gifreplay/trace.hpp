#pragma once

// Back half of execution trace generation: LCS scoring of candidate paths
// against the mapped index sequence, selection of the winner (longest LCS,
// then shortest path, then lexicographically smallest node sequence), and
// the 2M/T sequence-similarity metric used for evaluation.

#include <string>
#include <vector>

#include "gifreplay/error.hpp"
#include "gifreplay/utg.hpp"

namespace gifreplay {

struct LcsTable {
    // com[i][j]: LCS length of x[0..i) and seq[0..j); row/column 0 are zero.
    std::vector<std::vector<int>> com;
};

struct LcsResult {
    int length = 0;
    std::vector<std::string> witness;
    LcsTable table;
};

// Standard LCS dynamic program. The witness is recovered by walking the
// table back preferring diagonal, then up, then left, which makes it
// deterministic; any maximal witness would do for trace selection.
inline LcsResult lcs(const std::vector<std::string>& x, const std::vector<std::string>& seq) {
    const std::size_t m = x.size();
    const std::size_t n = seq.size();
    LcsResult r;
    r.table.com.assign(m + 1, std::vector<int>(n + 1, 0));
    auto& com = r.table.com;

    for (std::size_t i = 1; i <= m; ++i) {
        for (std::size_t j = 1; j <= n; ++j) {
            if (x[i - 1] == seq[j - 1])
                com[i][j] = com[i - 1][j - 1] + 1;
            else if (com[i - 1][j] >= com[i][j - 1])
                com[i][j] = com[i - 1][j];
            else
                com[i][j] = com[i][j - 1];
        }
    }
    r.length = com[m][n];

    std::size_t i = m, j = n;
    while (i > 0 && j > 0) {
        if (x[i - 1] == seq[j - 1]) {
            r.witness.push_back(x[i - 1]);
            --i;
            --j;
        } else if (com[i - 1][j] >= com[i][j - 1]) {
            --i;
        } else {
            --j;
        }
    }
    std::reverse(r.witness.begin(), r.witness.end());
    return r;
}

struct ExecutionTrace {
    NodePath path;                     // launch .. last index node
    std::vector<std::string> lcs;      // witness against the index sequence
    int lcs_len = 0;
    double covered = 0.0;              // lcs_len / |index sequence|
};

// Enumerates the acyclic candidates from the launch node to the last index
// node and picks the one with the longest LCS against the index sequence;
// ties go to the shorter path, then to the lexicographically smaller node
// sequence so the result is reproducible byte for byte.
inline ExecutionTrace generate_trace(const std::vector<std::string>& index_sequence, const Utg& g,
                                     const PathLimits& limits = {}) {
    if (index_sequence.empty())
        throw EmptyInputError("generate_trace: empty index sequence");
    if (g.launch.empty() || !g.has_node(g.launch))
        throw ContractError("generate_trace: UTG has no launch node");
    const std::string& target = index_sequence.back();
    if (!g.has_node(target))
        throw UnreachableError("generate_trace: last index node \"" + target +
                                   "\" is not in the UTG",
                               target);

    const auto candidates = enumerate_acyclic_paths(g, g.launch, target, limits);
    if (candidates.empty())
        throw UnreachableError("generate_trace: no acyclic path from launch \"" + g.launch +
                                   "\" to last index node \"" + target + "\"",
                               target);

    const NodePath* best = nullptr;
    LcsResult best_lcs;
    for (const auto& cand : candidates) {
        LcsResult r = lcs(index_sequence, cand.nodes);
        const bool better =
            !best || r.length > best_lcs.length ||
            (r.length == best_lcs.length &&
             (cand.nodes.size() < best->nodes.size() ||
              (cand.nodes.size() == best->nodes.size() && cand.nodes < best->nodes)));
        if (better) {
            best = &cand;
            best_lcs = std::move(r);
        }
    }

    ExecutionTrace t;
    t.path = *best;
    t.lcs = best_lcs.witness;
    t.lcs_len = best_lcs.length;
    t.covered = static_cast<double>(best_lcs.length) / static_cast<double>(index_sequence.size());
    return t;
}

// 2M/T similarity between two node sequences: M is their LCS length, T the
// sum of their lengths. Two empty sequences count as identical.
inline double sequence_similarity(const std::vector<std::string>& truth,
                                  const std::vector<std::string>& predicted) {
    if (truth.empty() && predicted.empty()) return 1.0;
    const std::size_t total = truth.size() + predicted.size();
    if (total == 0) return 1.0;
    const int m = lcs(truth, predicted).length;
    return 2.0 * m / static_cast<double>(total);
}

}  // namespace gifreplay
