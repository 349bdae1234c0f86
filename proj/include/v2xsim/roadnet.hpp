#pragma once

#include "v2xsim/rng.hpp"

#include "json.hpp"

#include <cstddef>
#include <vector>

namespace v2xsim {

struct Vec2
{
    double x{0.0};
    double y{0.0};
};

double Distance(const Vec2& a, const Vec2& b);

/// Directed lane segment between two nodes.
struct Edge
{
    int from{0};
    int to{0};
    double length{0.0};
    double laneWidthM{3.5};
    double speedLimitMps{13.9};
};

/// Road graph over a bounded square. Every undirected road contributes two
/// directed edges, so the graph is strongly connected and routes never
/// dead-end (road ends allow a U-turn).
struct RoadGraph
{
    double boundsM{1000.0};
    std::vector<Vec2> nodes;
    std::vector<Edge> edges;
    std::vector<int> junctions;             ///< node ids flagged as junctions
    std::vector<std::vector<int>> outEdges; ///< per node, outgoing edge ids

    double TotalLaneLength() const;
};

struct KinematicState
{
    Vec2 position;
    double speedMps{0.0};
    int edge{0};
    double edgeOffsetM{0.0};
};

/// Deterministic template map: two parallel arterials crossed by vertical
/// connectors, yielding exactly junctionCount junction nodes. The template
/// supports 1 to 4 junctions.
RoadGraph BuildDefaultMap(double boundsM, int junctionCount);

/// Places n vehicles uniformly at random over total lane length; initial
/// speeds uniform in [speedMin, speedMax] m/s.
std::vector<KinematicState> SpawnVehicles(const RoadGraph& graph,
                                          int n,
                                          RngStream& stream,
                                          double speedMinMps = 8.3,
                                          double speedMaxMps = 13.9);

/// Advances every vehicle by speed*dt along its edge; at an edge end the
/// next edge is chosen uniformly among outgoing edges via the stream.
void StepMobility(const RoadGraph& graph,
                  std::vector<KinematicState>& states,
                  double dtS,
                  RngStream& stream);

/// Euclidean 2-D distance between vehicles i and j. Throws on bad index.
double PairwiseDistance(const std::vector<KinematicState>& states, std::size_t i, std::size_t j);

/// Map export for plotting: {"bounds_m", "nodes", "edges", "junctions"}.
nlohmann::json ToJson(const RoadGraph& graph);

} // namespace v2xsim
