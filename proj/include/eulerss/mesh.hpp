#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "eulerss/core.hpp"

namespace eulerss {

enum class Role { Wall, Inflow, Outflow };

std::string role_name(Role r);
Role parse_role(const std::string& s);

struct BoundaryEdge {
    int a = -1;          // start vertex (fluid on the left when walking a -> b)
    int b = -1;          // end vertex
    int comp = -1;       // boundary component id
    int tri = -1;        // adjacent triangle
    double length = 0;
    Vec2 normal;         // unit normal pointing out of the fluid
    Vec2 tangent;        // perp(normal)
    Vec2 midpoint;
};

struct BoundaryComponent {
    int id = -1;
    Role role = Role::Wall;
    std::vector<int> edges;   // indices into Mesh::boundary_edges, ordered along the loop
    std::vector<int> nodes;   // loop vertices, nodes[k] = start of edges[k]
    double length = 0;
};

// Analytic circle attached to a boundary component by a generator; used to place
// refined boundary midpoints on the true curve.
struct CircleTag {
    Vec2 center;
    double radius = 0;
};

struct InteriorEdge {
    int a = -1, b = -1;   // a -> b has tri_left on its left
    int left = -1, right = -1;
    double length = 0;
    Vec2 normal;          // unit normal from left triangle into right triangle
};

class Mesh {
public:
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<BoundaryEdge> boundary_edges;
    std::vector<BoundaryComponent> components;
    std::vector<InteriorEdge> interior_edges;
    // neighbors[t][k]: triangle across the edge opposite local vertex k, or -(1 + boundary edge index).
    std::vector<std::array<int, 3>> neighbors;
    std::vector<double> areas;
    std::vector<Vec2> centroids;
    std::vector<int> node_component;   // component id for boundary nodes, -1 for interior nodes
    std::vector<std::optional<CircleTag>> circles;   // per component, generator metadata

    int num_vertices() const { return static_cast<int>(vertices.size()); }
    int num_triangles() const { return static_cast<int>(triangles.size()); }
    int num_components() const { return static_cast<int>(components.size()); }
    int num_edges() const { return static_cast<int>(interior_edges.size() + boundary_edges.size()); }
    int euler_characteristic() const { return num_vertices() - num_edges() + num_triangles(); }
    double total_area() const;
    double total_boundary_length() const;
    double scale() const;   // bounding box diagonal
    double min_angle_deg() const;
    double max_edge_length() const;
    double incircle_diameter(int t) const;
    std::vector<int> components_with_role(Role r) const;
};

// Builds adjacency and boundary data from raw arrays and validates every invariant.
// Boundary edges are given as (i, j, comp) with arbitrary orientation.
Mesh build_mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles,
                const std::vector<std::array<int, 3>>& boundary_edges, const std::vector<Role>& roles,
                std::vector<std::optional<CircleTag>> circles = {});

struct LoadOptions {
    bool require_outer_wall = true;
};

Mesh load_mesh(const std::string& path, LoadOptions opts = {});
Mesh parse_mesh(const std::string& text, LoadOptions opts = {});
void save_mesh(const Mesh& m, const std::string& path);
std::string format_mesh(const Mesh& m);

Mesh generate_annulus(double r0, double r1, int nr, int ntheta, Role inner_role = Role::Wall,
                      Role outer_role = Role::Wall);

Mesh uniform_refine(const Mesh& m);

// Shoelace area enclosed by a component loop (positive).
double loop_area(const Mesh& m, int comp);

}  // namespace eulerss
