#pragma once

#include <string>

#include <json.hpp>

#include "varalg/oracle.hpp"
#include "varalg/solver.hpp"
#include "varalg/thresholds.hpp"

namespace varalg {

// Problem files:
//   { "matrix": {"kind": "tridiagonal", "n": 2, "a": -1, "b": 2}
//             | {"kind": "fourth_order", "n": 4}
//             | {"kind": "lattice", "rect": [2, 2]}
//             | {"kind": "lattice", "points": [[1,1], [2,1]]}
//             | {"kind": "dense", "rows": [[2]]}
//             | "2 -1 2",            // compact text form "n a b"
//     "nonlinearity": {"kind": "rational_sq", "params": {"n": 1}}
//                   | {"kind": "expr", "per_component": ["s", "..."]} }
// The component count defaults to the matrix dimension.
Problem load_problem(const nlohmann::json& doc);
Problem load_problem_file(const std::string& path);

// Report serialization. Infinite interval endpoints serialize as the string
// "inf" (JSON has no infinity literal).
nlohmann::json to_json(const CriticalPoint& cp);
nlohmann::json to_json(const HypothesisVerdict& hv);
nlohmann::json to_json(const ThresholdReport& rep);
nlohmann::json to_json(const SweepResult& sweep);

nlohmann::json spectral_summary(const Problem& problem);

std::string classification_name(const Classification& c);

}  // namespace varalg
