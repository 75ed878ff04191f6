#include "varalg/problems.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <sstream>

namespace varalg {

namespace {

const std::array<Net::Point, 4> kNeighborOffsets = {
    Net::Point{1, 0}, Net::Point{-1, 0}, Net::Point{0, 1}, Net::Point{0, -1}};

std::string point_label(const Net::Point& p) {
  return "(" + std::to_string(p.first) + "," + std::to_string(p.second) + ")";
}

}  // namespace

Net make_net(std::vector<Net::Point> points) {
  std::set<Net::Point> in(points.begin(), points.end());
  if (in.empty()) throw EmptyNet("make_net: no lattice points");

  // connectivity by flood fill
  std::set<Net::Point> seen;
  std::deque<Net::Point> queue{*in.begin()};
  seen.insert(*in.begin());
  while (!queue.empty()) {
    const Net::Point z = queue.front();
    queue.pop_front();
    for (const auto& d : kNeighborOffsets) {
      const Net::Point w{z.first + d.first, z.second + d.second};
      if (in.count(w) && !seen.count(w)) {
        seen.insert(w);
        queue.push_back(w);
      }
    }
  }
  if (seen.size() != in.size())
    throw Disconnected("make_net: " + std::to_string(in.size() - seen.size()) +
                       " point(s) unreachable under unit-distance adjacency");

  Net net;
  net.points.assign(in.begin(), in.end());
  // row-major over sorted (j, i)
  std::sort(net.points.begin(), net.points.end(),
            [](const Net::Point& a, const Net::Point& b) {
              return a.second != b.second ? a.second < b.second
                                          : a.first < b.first;
            });
  for (int k = 0; k < net.size(); ++k) net.index_map[net.points[k]] = k + 1;

  std::set<Net::Point> bnd;
  for (const auto& z : net.points)
    for (const auto& d : kNeighborOffsets) {
      const Net::Point w{z.first + d.first, z.second + d.second};
      if (!in.count(w)) bnd.insert(w);
    }
  net.boundary.assign(bnd.begin(), bnd.end());
  return net;
}

Net rectangle_net(int m1, int m2) {
  if (m1 < 1 || m2 < 1)
    throw BadParams("rectangle_net: side lengths must be >= 1");
  std::vector<Net::Point> pts;
  pts.reserve(static_cast<std::size_t>(m1) * m2);
  for (int j = 1; j <= m2; ++j)
    for (int i = 1; i <= m1; ++i) pts.emplace_back(i, j);
  return make_net(std::move(pts));
}

Problem make_problem(SpdMatrix A, Nonlinearity f, ProblemOrigin origin,
                     std::vector<std::string> labels) {
  if (A.n() != f.size())
    throw DimensionMismatch("make_problem: matrix is " + std::to_string(A.n()) +
                            "-dimensional but the nonlinearity has " +
                            std::to_string(f.size()) + " component(s)");
  if (labels.empty())
    for (int k = 1; k <= A.n(); ++k) labels.push_back(std::to_string(k));
  return Problem{std::move(A), std::move(f), std::move(origin),
                 std::move(labels)};
}

Problem build_tridiagonal(int n, double a, double b, Nonlinearity f) {
  if (n < 2) throw BadParams("build_tridiagonal: n must be >= 2");
  if (!(a < 0.0) || !(b > 0.0))
    throw BadParams("build_tridiagonal: requires a < 0 < b");
  const double cosine = std::cos(M_PI / (n + 1));
  if (!(cosine < -b / (2.0 * a)))
    throw NotPositiveDefinite(
        "build_tridiagonal: cos(pi/(n+1)) = " + std::to_string(cosine) +
            " >= -b/(2a) = " + std::to_string(-b / (2.0 * a)),
        b + 2.0 * a * cosine);

  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    m(i, i) = b;
    if (i + 1 < n) {
      m(i, i + 1) = a;
      m(i + 1, i) = a;
    }
  }
  SpdMatrix A = make_spd(m);

  const double lambda1 = b + 2.0 * a * cosine;
  if (std::abs(A.lambda_min() - lambda1) > 1e-10 * std::max(1.0, std::abs(b)))
    throw Error("build_tridiagonal: computed lambda_1 " +
                std::to_string(A.lambda_min()) +
                " does not match the closed form " + std::to_string(lambda1));

  return make_problem(std::move(A), std::move(f), SecondOrderOrigin{n, a, b});
}

Problem build_fourth_order(int n, Nonlinearity f) {
  if (n < 1) throw BadParams("build_fourth_order: n must be >= 1");
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    m(i, i) = 6.0;
    if (i + 1 < n) {
      m(i, i + 1) = -4.0;
      m(i + 1, i) = -4.0;
    }
    if (i + 2 < n) {
      m(i, i + 2) = 1.0;
      m(i + 2, i) = 1.0;
    }
  }
  SpdMatrix A = make_spd(m);
  return make_problem(std::move(A), std::move(f), FourthOrderOrigin{n});
}

Problem build_lattice(const Net& net, Nonlinearity f) {
  const int n = net.size();
  if (n == 0) throw EmptyNet("build_lattice: empty net");

  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (const auto& z : net.points) {
    const int r = net.index_map.at(z) - 1;
    m(r, r) = 4.0;
    for (const auto& d : kNeighborOffsets) {
      const Net::Point w{z.first + d.first, z.second + d.second};
      auto it = net.index_map.find(w);
      if (it != net.index_map.end()) m(r, it->second - 1) = -1.0;
      // boundary neighbors carry Dirichlet zero data and drop out
    }
  }
  SpdMatrix A = make_spd(m);

  const SignConditionVerdict sign = check_sign_conditions(A);
  if (!sign.a1_holds)
    throw Error("build_lattice: assembled matrix violates sign condition (A1)");

  std::vector<std::string> labels;
  labels.reserve(n);
  for (const auto& z : net.points) labels.push_back(point_label(z));

  return make_problem(std::move(A), std::move(f),
                      LatticeOrigin{net, sign.a2_holds}, std::move(labels));
}

TridiagonalSpec parse_tridiagonal_text(const std::string& text) {
  std::istringstream in(text);
  TridiagonalSpec spec{};
  std::string rest;
  if (!(in >> spec.n >> spec.a >> spec.b) || (in >> rest))
    throw BadParams("parse_tridiagonal_text: expected \"n a b\", got \"" +
                    text + "\"");
  return spec;
}

}  // namespace varalg
