#pragma once

// UI Transition Graph: GUI states with screenshots, labeled action edges,
// a designated launch node, and enumeration of simple paths between nodes.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "gifreplay/error.hpp"
#include "gifreplay/image.hpp"
#include "gifreplay/image_io.hpp"

namespace gifreplay {

struct UtgNode {
    std::string id;
    std::string screenshot_path;  // as written in the manifest
    std::string label;
    LuminanceMask screenshot;  // decoded and validated at load time
};

struct UtgEdge {
    std::string from;
    std::string to;
    std::string action;
};

struct NodePath {
    std::vector<std::string> nodes;
    std::vector<UtgEdge> edges;  // one per hop
};

struct Utg {
    std::map<std::string, UtgNode> nodes;
    std::vector<UtgEdge> edges;
    std::string launch;
    // from -> (to, index into edges); sorted by to-id then manifest order,
    // which fixes the traversal order once and for all.
    std::map<std::string, std::vector<std::pair<std::string, int>>> adjacency;

    void rebuild_adjacency() {
        adjacency.clear();
        for (int i = 0; i < static_cast<int>(edges.size()); ++i)
            adjacency[edges[i].from].push_back({edges[i].to, i});
        for (auto& [from, list] : adjacency)
            std::stable_sort(list.begin(), list.end(),
                             [](const auto& a, const auto& b) { return a.first < b.first; });
    }

    bool has_node(const std::string& id) const { return nodes.count(id) > 0; }
};

struct PathLimits {
    std::size_t max_paths = 100000;
    int max_depth = 64;  // maximum nodes on one path
};

// Loads and validates a manifest:
//   {"launch": "A",
//    "nodes": [{"id": "A", "screenshot": "shots/A.png", "label": "Home"}],
//    "edges": [{"from": "A", "to": "B", "action": "tap:menu"}]}
// Screenshot paths resolve relative to the manifest. Every violation is
// collected before the load is rejected.
inline Utg load_utg(const std::string& manifest_path) {
    namespace fs = std::filesystem;
    std::ifstream in(manifest_path);
    if (!in) throw DecodeError("cannot open UTG manifest: " + manifest_path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DecodeError("UTG manifest is not valid JSON: " + manifest_path + ": " + e.what());
    }

    Utg g;
    std::vector<std::string> violations;
    const fs::path base = fs::path(manifest_path).parent_path();

    try {
        for (const auto& jn : j.value("nodes", nlohmann::json::array())) {
            UtgNode node;
            node.id = jn.at("id").get<std::string>();
            node.screenshot_path = jn.at("screenshot").get<std::string>();
            node.label = jn.value("label", "");
            if (g.nodes.count(node.id)) {
                violations.push_back("duplicate node id \"" + node.id + "\"");
                continue;
            }
            const fs::path shot = base / node.screenshot_path;
            try {
                node.screenshot = to_luminance(load_image(shot.string()));
            } catch (const DecodeError& e) {
                violations.push_back("node \"" + node.id + "\": screenshot unreadable: " +
                                     e.what());
            }
            g.nodes.emplace(node.id, std::move(node));
        }
        for (const auto& je : j.value("edges", nlohmann::json::array())) {
            UtgEdge e;
            e.from = je.at("from").get<std::string>();
            e.to = je.at("to").get<std::string>();
            e.action = je.value("action", "");
            if (!g.has_node(e.from))
                violations.push_back("edge references unknown node \"" + e.from + "\"");
            if (!g.has_node(e.to))
                violations.push_back("edge references unknown node \"" + e.to + "\"");
            g.edges.push_back(std::move(e));
        }
        g.launch = j.value("launch", "");
        if (g.launch.empty())
            violations.push_back("manifest does not name a launch node");
        else if (!g.has_node(g.launch))
            violations.push_back("launch node \"" + g.launch + "\" does not exist");
    } catch (const nlohmann::json::exception& e) {
        throw DecodeError("UTG manifest schema error: " + manifest_path + ": " + e.what());
    }

    if (!violations.empty()) {
        std::string msg = "UTG validation failed for " + manifest_path + ":";
        for (const auto& v : violations) msg += "\n  - " + v;
        throw ValidationError(msg, violations);
    }

    g.rebuild_adjacency();
    return g;
}

// Depth-first enumeration of every simple path from start to target with
// backtracking over a visited set. Parallel edges do not multiply paths;
// the earliest manifest edge witnesses a hop. Throws ExplosionError the
// moment either limit would be exceeded, rather than returning a silently
// truncated result.
inline std::vector<NodePath> enumerate_acyclic_paths(const Utg& g, const std::string& start,
                                                     const std::string& target,
                                                     const PathLimits& limits = {}) {
    if (!g.has_node(start))
        throw ContractError("enumerate_acyclic_paths: unknown start node \"" + start + "\"");
    if (!g.has_node(target))
        throw ContractError("enumerate_acyclic_paths: unknown target node \"" + target + "\"");

    std::vector<NodePath> paths;
    std::set<std::string> visited;
    std::vector<std::string> stack_nodes;
    std::vector<const UtgEdge*> stack_edges;

    auto dfs = [&](auto&& self, const std::string& node) -> void {
        if (static_cast<int>(stack_nodes.size()) >= limits.max_depth)
            throw ExplosionError("path enumeration exceeded max_depth=" +
                                     std::to_string(limits.max_depth),
                                 "max_depth");
        visited.insert(node);
        stack_nodes.push_back(node);

        if (node == target) {
            if (paths.size() >= limits.max_paths)
                throw ExplosionError("path enumeration exceeded max_paths=" +
                                         std::to_string(limits.max_paths),
                                     "max_paths");
            NodePath p;
            p.nodes = stack_nodes;
            for (const auto* e : stack_edges) p.edges.push_back(*e);
            paths.push_back(std::move(p));
        } else {
            const auto it = g.adjacency.find(node);
            if (it != g.adjacency.end()) {
                std::string last_to;
                for (const auto& [to, edge_idx] : it->second) {
                    if (to == last_to) continue;  // parallel edge, same hop
                    last_to = to;
                    if (visited.count(to)) continue;
                    stack_edges.push_back(&g.edges[edge_idx]);
                    self(self, to);
                    stack_edges.pop_back();
                }
            }
        }

        stack_nodes.pop_back();
        visited.erase(node);
    };

    dfs(dfs, start);
    return paths;
}

}  // namespace gifreplay
