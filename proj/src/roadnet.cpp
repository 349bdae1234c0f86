#include "v2xsim/roadnet.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace v2xsim {

double
Distance(const Vec2& a, const Vec2& b)
{
    return std::hypot(a.x - b.x, a.y - b.y);
}

double
RoadGraph::TotalLaneLength() const
{
    double total = 0.0;
    for (const auto& e : edges)
    {
        total += e.length;
    }
    return total;
}

namespace {

class GraphBuilder
{
  public:
    explicit GraphBuilder(double boundsM)
    {
        m_graph.boundsM = boundsM;
    }

    int Node(double x, double y)
    {
        for (std::size_t i = 0; i < m_graph.nodes.size(); ++i)
        {
            if (std::abs(m_graph.nodes[i].x - x) < 1e-9 && std::abs(m_graph.nodes[i].y - y) < 1e-9)
            {
                return static_cast<int>(i);
            }
        }
        m_graph.nodes.push_back({x, y});
        return static_cast<int>(m_graph.nodes.size() - 1);
    }

    /// Adds a two-way road through the given points, one directed edge per
    /// direction per consecutive pair.
    void Chain(const std::vector<Vec2>& points)
    {
        for (std::size_t i = 0; i + 1 < points.size(); ++i)
        {
            const int a = Node(points[i].x, points[i].y);
            const int b = Node(points[i + 1].x, points[i + 1].y);
            const double len = Distance(points[i], points[i + 1]);
            m_graph.edges.push_back({a, b, len, 3.5, 13.9});
            m_graph.edges.push_back({b, a, len, 3.5, 13.9});
        }
    }

    void Junction(double x, double y)
    {
        m_graph.junctions.push_back(Node(x, y));
    }

    RoadGraph Finish()
    {
        m_graph.outEdges.assign(m_graph.nodes.size(), {});
        for (std::size_t i = 0; i < m_graph.edges.size(); ++i)
        {
            m_graph.outEdges[static_cast<std::size_t>(m_graph.edges[i].from)].push_back(
                static_cast<int>(i));
        }
        return std::move(m_graph);
    }

  private:
    RoadGraph m_graph;
};

} // namespace

RoadGraph
BuildDefaultMap(double boundsM, int junctionCount)
{
    if (!(boundsM > 0.0))
    {
        throw std::invalid_argument("BuildDefaultMap: bounds must be > 0");
    }
    if (junctionCount < 1 || junctionCount > 4)
    {
        throw std::invalid_argument("BuildDefaultMap: template supports 1-4 junctions");
    }

    const double b = boundsM;
    GraphBuilder g(b);

    if (junctionCount == 1)
    {
        // One arterial, one full connector, crossing mid-map.
        g.Chain({{0, b / 2}, {b / 2, b / 2}, {b, b / 2}});
        g.Chain({{b / 2, 0}, {b / 2, b / 2}, {b / 2, b}});
        g.Junction(b / 2, b / 2);
        return g.Finish();
    }

    const double yLow = b / 3.0;
    const double yHigh = 2.0 * b / 3.0;
    const double xMain = b / 2.0;
    const double xSide = 3.0 * b / 4.0;

    if (junctionCount == 2)
    {
        g.Chain({{0, yLow}, {xMain, yLow}, {b, yLow}});
        g.Chain({{0, yHigh}, {xMain, yHigh}, {b, yHigh}});
        g.Chain({{xMain, 0}, {xMain, yLow}, {xMain, yHigh}, {xMain, b}});
        g.Junction(xMain, yLow);
        g.Junction(xMain, yHigh);
    }
    else if (junctionCount == 3)
    {
        g.Chain({{0, yLow}, {xMain, yLow}, {xSide, yLow}, {b, yLow}});
        g.Chain({{0, yHigh}, {xMain, yHigh}, {b, yHigh}});
        g.Chain({{xMain, 0}, {xMain, yLow}, {xMain, yHigh}, {xMain, b}});
        // T-junction: the side connector ends at the lower arterial.
        g.Chain({{xSide, 0}, {xSide, yLow}});
        g.Junction(xMain, yLow);
        g.Junction(xMain, yHigh);
        g.Junction(xSide, yLow);
    }
    else
    {
        g.Chain({{0, yLow}, {xMain, yLow}, {xSide, yLow}, {b, yLow}});
        g.Chain({{0, yHigh}, {xMain, yHigh}, {xSide, yHigh}, {b, yHigh}});
        g.Chain({{xMain, 0}, {xMain, yLow}, {xMain, yHigh}, {xMain, b}});
        g.Chain({{xSide, 0}, {xSide, yLow}, {xSide, yHigh}, {xSide, b}});
        g.Junction(xMain, yLow);
        g.Junction(xMain, yHigh);
        g.Junction(xSide, yLow);
        g.Junction(xSide, yHigh);
    }
    return g.Finish();
}

namespace {

Vec2
PositionOnEdge(const RoadGraph& graph, int edgeId, double offset)
{
    const Edge& e = graph.edges[static_cast<std::size_t>(edgeId)];
    const Vec2& a = graph.nodes[static_cast<std::size_t>(e.from)];
    const Vec2& b = graph.nodes[static_cast<std::size_t>(e.to)];
    const double t = e.length > 0.0 ? offset / e.length : 0.0;
    return {a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t};
}

} // namespace

std::vector<KinematicState>
SpawnVehicles(const RoadGraph& graph,
              int n,
              RngStream& stream,
              double speedMinMps,
              double speedMaxMps)
{
    if (n < 1)
    {
        throw std::invalid_argument("SpawnVehicles: n must be >= 1");
    }
    const double total = graph.TotalLaneLength();
    std::vector<KinematicState> states;
    states.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
    {
        const double pick = stream.NextUniform() * total;
        double acc = 0.0;
        int edgeId = 0;
        double offset = 0.0;
        for (std::size_t e = 0; e < graph.edges.size(); ++e)
        {
            const double len = graph.edges[e].length;
            if (pick < acc + len || e + 1 == graph.edges.size())
            {
                edgeId = static_cast<int>(e);
                offset = std::clamp(pick - acc, 0.0, len);
                break;
            }
            acc += len;
        }
        KinematicState s;
        s.edge = edgeId;
        s.edgeOffsetM = offset;
        s.speedMps = speedMinMps + stream.NextUniform() * (speedMaxMps - speedMinMps);
        s.speedMps = std::min(s.speedMps, graph.edges[static_cast<std::size_t>(edgeId)].speedLimitMps);
        s.position = PositionOnEdge(graph, edgeId, offset);
        states.push_back(s);
    }
    return states;
}

void
StepMobility(const RoadGraph& graph, std::vector<KinematicState>& states, double dtS, RngStream& stream)
{
    if (dtS < 0.0)
    {
        throw std::invalid_argument("StepMobility: dt must be >= 0");
    }
    if (dtS == 0.0)
    {
        return;
    }
    for (auto& s : states)
    {
        double advance = s.speedMps * dtS;
        s.edgeOffsetM += advance;
        while (s.edgeOffsetM > graph.edges[static_cast<std::size_t>(s.edge)].length)
        {
            const Edge& cur = graph.edges[static_cast<std::size_t>(s.edge)];
            s.edgeOffsetM -= cur.length;
            const auto& outs = graph.outEdges[static_cast<std::size_t>(cur.to)];
            const int next = outs[stream.NextBelow(outs.size())];
            s.edge = next;
            s.speedMps = std::min(s.speedMps, graph.edges[static_cast<std::size_t>(next)].speedLimitMps);
        }
        s.position = PositionOnEdge(graph, s.edge, s.edgeOffsetM);
    }
}

double
PairwiseDistance(const std::vector<KinematicState>& states, std::size_t i, std::size_t j)
{
    if (i >= states.size() || j >= states.size())
    {
        throw std::out_of_range("PairwiseDistance: vehicle index out of range");
    }
    return Distance(states[i].position, states[j].position);
}

nlohmann::json
ToJson(const RoadGraph& graph)
{
    nlohmann::json j;
    j["bounds_m"] = graph.boundsM;
    j["nodes"] = nlohmann::json::array();
    for (const auto& n : graph.nodes)
    {
        j["nodes"].push_back({n.x, n.y});
    }
    j["edges"] = nlohmann::json::array();
    for (const auto& e : graph.edges)
    {
        j["edges"].push_back({{"from", e.from},
                              {"to", e.to},
                              {"length_m", e.length},
                              {"lane_width_m", e.laneWidthM},
                              {"speed_limit_mps", e.speedLimitMps}});
    }
    j["junctions"] = graph.junctions;
    return j;
}

} // namespace v2xsim
