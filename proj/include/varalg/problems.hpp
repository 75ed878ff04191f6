#pragma once

#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "varalg/linalg.hpp"
#include "varalg/nonlin.hpp"

namespace varalg {

// A finite connected set of lattice points with its exterior boundary and a
// bijection onto 1..n. For general nets the bijection is row-major over
// sorted (j, i); rectangle_net reproduces h(i,j) = i + m1*(j-1).
struct Net {
  using Point = std::pair<int, int>;            // (i, j)
  std::vector<Point> points;                    // index_map order, 1-based
  std::vector<Point> boundary;                  // exterior boundary, sorted
  std::map<Point, int> index_map;               // point -> 1..n

  int size() const { return static_cast<int>(points.size()); }
};

// Validates connectivity (unit-distance adjacency) and computes the exterior
// boundary. Throws EmptyNet, Disconnected. Duplicate points are collapsed.
Net make_net(std::vector<Net::Point> points);

// Points {(i,j) : 1 <= i <= m1, 1 <= j <= m2}.
Net rectangle_net(int m1, int m2);

// Provenance of an assembled problem.
struct GenericOrigin {};
struct SecondOrderOrigin { int n; double a; double b; };
struct FourthOrderOrigin { int n; };
struct LatticeOrigin {
  Net net;
  bool a2_holds;  // sign condition (A2), checked at assembly and reported
};
using ProblemOrigin =
    std::variant<GenericOrigin, SecondOrderOrigin, FourthOrderOrigin, LatticeOrigin>;

// The system A u = lambda f(u) minus its parameter.
struct Problem {
  SpdMatrix matrix;
  Nonlinearity nonlinearity;
  ProblemOrigin origin;
  std::vector<std::string> labels;  // one per index: "k" or "(i,j)"

  int n() const { return matrix.n(); }
};

// Generic assembly; checks the dimension match.
Problem make_problem(SpdMatrix A, Nonlinearity f,
                     ProblemOrigin origin = GenericOrigin{},
                     std::vector<std::string> labels = {});

// Trid_n(a, b, a) for a < 0 < b under cos(pi/(n+1)) < -b/(2a); the assembled
// spectrum is asserted against b + 2a cos(k pi/(n+1)).
Problem build_tridiagonal(int n, double a, double b, Nonlinearity f);

// Pentadiagonal fourth-difference matrix: interior stencil 1 -4 6 -4 1,
// corner rows (6, -4, 1, 0, ...) and mirrored.
Problem build_fourth_order(int n, Nonlinearity f);

// Dirichlet difference operator on a net: diagonal 4, -1 between neighbors
// inside the net, boundary values dropped. Asserts SPD and sign condition
// (A1); (A2) is checked and recorded in the origin.
Problem build_lattice(const Net& net, Nonlinearity f);

// Compact text form "n a b" for Trid_n(a, b, a).
struct TridiagonalSpec { int n; double a; double b; };
TridiagonalSpec parse_tridiagonal_text(const std::string& text);

}  // namespace varalg
