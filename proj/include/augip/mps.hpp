#pragma once

#include <iosfwd>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "augip/sparse.hpp"

namespace augip {

struct ParseError : std::runtime_error {
  int line;
  ParseError(int line_, const std::string& what)
      : std::runtime_error("line " + std::to_string(line_) + ": " + what),
        line(line_) {}
};
struct ModelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class RowSense { E, L, G, N };

constexpr double kInf = std::numeric_limits<double>::infinity();

/// In-memory image of an MPS file (supported subset).
struct LpModel {
  std::string name;
  std::string objective_name;
  std::vector<std::pair<std::string, RowSense>> rows;  // constraint rows only
  struct Column {
    std::string name;
    std::vector<std::pair<std::string, double>> entries;  // (row name, coeff)
    double objective = 0.0;
  };
  std::vector<Column> columns;
  std::map<std::string, double> rhs;  // defaults to 0 for missing rows
  struct Bound {
    double lower = 0.0;
    double upper = kInf;
  };
  std::map<std::string, Bound> bounds;  // default (0, +inf)
  double objective_rhs = 0.0;           // RHS entry on the objective row
  std::vector<std::string> warnings;
};

/// min c'x s.t. Ax = b, x >= 0.
struct StandardFormLP {
  SparseColMatrix A;
  Vector b;
  Vector c;
};

/// How each original column maps into the standard form.
struct VarMap {
  struct Record {
    enum Kind { Shifted, Reflected, Split, Fixed };
    std::string name;
    Kind kind = Shifted;
    double shift = 0.0;   // lower bound (Shifted), upper bound (Reflected),
                          // fixed value (Fixed)
    Index col1 = -1;      // primary standard-form column
    Index col2 = -1;      // negative part for Split
  };
  std::vector<Record> records;
  std::vector<Index> slack_cols;
  Index std_cols = 0;
  double objective_constant = 0.0;
};

LpModel parse_mps(std::istream& is);
std::pair<StandardFormLP, VarMap> to_standard_form(const LpModel& m);
std::map<std::string, double> recover_solution(const VarMap& map,
                                               const Vector& x_std);

}  // namespace augip
