#include "augip/mps.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace augip {

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> toks;
  std::istringstream is(line);
  std::string t;
  while (is >> t) toks.push_back(t);
  return toks;
}

double parse_number(const std::string& tok, int line) {
  size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(tok, &pos);
  } catch (const std::exception&) {
    throw ParseError(line, "expected a number, got '" + tok + "'");
  }
  if (pos != tok.size())
    throw ParseError(line, "expected a number, got '" + tok + "'");
  if (!std::isfinite(v)) throw ParseError(line, "non-finite number");
  return v;
}

}  // namespace

LpModel parse_mps(std::istream& is) {
  LpModel m;
  enum Section { None, Name, Rows, Columns, Rhs, Bounds, Done };
  Section section = None;

  std::unordered_map<std::string, RowSense> row_sense;
  std::unordered_set<std::string> ignored_rows;  // non-objective N rows
  std::unordered_map<std::string, size_t> col_index;
  std::unordered_map<std::string, std::set<std::string>> col_rows_seen;

  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '*') continue;
    bool header = line[0] != ' ' && line[0] != '\t';
    std::vector<std::string> toks = tokenize(line);
    if (toks.empty()) continue;

    if (header) {
      const std::string& sec = toks[0];
      if (sec == "NAME") {
        if (toks.size() > 1) m.name = toks[1];
        section = Name;
      } else if (sec == "ROWS") {
        section = Rows;
      } else if (sec == "COLUMNS") {
        section = Columns;
      } else if (sec == "RHS") {
        section = Rhs;
      } else if (sec == "BOUNDS") {
        section = Bounds;
      } else if (sec == "ENDATA") {
        section = Done;
        break;
      } else if (sec == "RANGES") {
        throw ParseError(lineno, "RANGES section is not supported");
      } else {
        throw ParseError(lineno, "unknown section '" + sec + "'");
      }
      continue;
    }

    switch (section) {
      case Rows: {
        if (toks.size() != 2)
          throw ParseError(lineno, "ROWS line needs sense and name");
        const std::string& s = toks[0];
        const std::string& name = toks[1];
        if (row_sense.count(name) || ignored_rows.count(name))
          throw ParseError(lineno, "duplicate row '" + name + "'");
        RowSense sense;
        if (s == "N") {
          if (m.objective_name.empty()) {
            m.objective_name = name;
            row_sense[name] = RowSense::N;
          } else {
            m.warnings.push_back("ignoring extra free row '" + name + "'");
            ignored_rows.insert(name);
          }
          break;
        } else if (s == "E") {
          sense = RowSense::E;
        } else if (s == "L") {
          sense = RowSense::L;
        } else if (s == "G") {
          sense = RowSense::G;
        } else {
          throw ParseError(lineno, "unknown row sense '" + s + "'");
        }
        row_sense[name] = sense;
        m.rows.emplace_back(name, sense);
        break;
      }
      case Columns: {
        if (toks.size() >= 3 && toks[1] == "'MARKER'")
          throw ParseError(lineno, "integer markers are not supported");
        if (toks.size() < 3 || toks.size() % 2 == 0)
          throw ParseError(lineno, "COLUMNS line needs name and (row, value) pairs");
        const std::string& cname = toks[0];
        size_t ci;
        auto it = col_index.find(cname);
        if (it == col_index.end()) {
          ci = m.columns.size();
          col_index[cname] = ci;
          m.columns.push_back({cname, {}, 0.0});
        } else {
          ci = it->second;
        }
        auto& seen = col_rows_seen[cname];
        for (size_t k = 1; k + 1 < toks.size(); k += 2) {
          const std::string& rname = toks[k];
          double v = parse_number(toks[k + 1], lineno);
          if (!seen.insert(rname).second)
            throw ParseError(lineno, "duplicate entry for column '" + cname +
                                         "' in row '" + rname + "'");
          if (ignored_rows.count(rname)) continue;
          auto rs = row_sense.find(rname);
          if (rs == row_sense.end())
            throw ParseError(lineno, "reference to undeclared row '" + rname + "'");
          if (rname == m.objective_name)
            m.columns[ci].objective = v;
          else
            m.columns[ci].entries.emplace_back(rname, v);
        }
        break;
      }
      case Rhs: {
        if (toks.size() < 3 || toks.size() % 2 == 0)
          throw ParseError(lineno, "RHS line needs set name and (row, value) pairs");
        for (size_t k = 1; k + 1 < toks.size(); k += 2) {
          const std::string& rname = toks[k];
          double v = parse_number(toks[k + 1], lineno);
          if (ignored_rows.count(rname)) continue;
          if (rname == m.objective_name) {
            m.objective_rhs = v;
            continue;
          }
          if (!row_sense.count(rname))
            throw ParseError(lineno, "reference to undeclared row '" + rname + "'");
          m.rhs[rname] = v;
        }
        break;
      }
      case Bounds: {
        if (toks.size() < 3)
          throw ParseError(lineno, "BOUNDS line needs key, set and column");
        const std::string& key = toks[0];
        const std::string& cname = toks[2];
        if (!col_index.count(cname))
          throw ParseError(lineno, "bound on unknown column '" + cname + "'");
        LpModel::Bound& b = m.bounds[cname];  // default (0, +inf)
        if (key == "LO" || key == "UP" || key == "FX") {
          if (toks.size() < 4)
            throw ParseError(lineno, key + " bound needs a value");
          double v = parse_number(toks[3], lineno);
          if (key == "LO") {
            b.lower = v;
          } else if (key == "UP") {
            b.upper = v;
          } else {
            b.lower = v;
            b.upper = v;
          }
        } else if (key == "FR") {
          b.lower = -kInf;
          b.upper = kInf;
        } else if (key == "MI") {
          b.lower = -kInf;
        } else {
          throw ParseError(lineno, "unsupported bound key '" + key + "'");
        }
        break;
      }
      case Name:
      case None:
        throw ParseError(lineno, "data line outside any section");
      case Done:
        break;
    }
  }
  if (m.objective_name.empty())
    throw ParseError(lineno, "no objective (N) row declared");
  return m;
}

std::pair<StandardFormLP, VarMap> to_standard_form(const LpModel& m) {
  const Index num_model_rows = static_cast<Index>(m.rows.size());
  std::unordered_map<std::string, Index> row_index;
  for (Index i = 0; i < num_model_rows; ++i) row_index[m.rows[i].first] = i;

  VarMap map;
  map.objective_constant = -m.objective_rhs;

  Index next_col = 0;
  for (const auto& col : m.columns) {
    LpModel::Bound bnd;  // default (0, +inf)
    auto bit = m.bounds.find(col.name);
    if (bit != m.bounds.end()) bnd = bit->second;
    if (bnd.lower > bnd.upper)
      throw ModelError("infeasible bounds on column '" + col.name + "'");
    VarMap::Record rec;
    rec.name = col.name;
    if (std::isfinite(bnd.lower) && bnd.lower == bnd.upper) {
      rec.kind = VarMap::Record::Fixed;
      rec.shift = bnd.lower;
    } else if (std::isfinite(bnd.lower)) {
      rec.kind = VarMap::Record::Shifted;
      rec.shift = bnd.lower;
      rec.col1 = next_col++;
    } else if (std::isfinite(bnd.upper)) {
      rec.kind = VarMap::Record::Reflected;  // x = upper - x'
      rec.shift = bnd.upper;
      rec.col1 = next_col++;
    } else {
      rec.kind = VarMap::Record::Split;  // x = x+ - x-
      rec.col1 = next_col++;
      rec.col2 = next_col++;
    }
    map.records.push_back(rec);
  }

  // rows: model rows first, then one row per residual upper bound
  std::vector<double> b(num_model_rows, 0.0);
  for (Index i = 0; i < num_model_rows; ++i) {
    auto it = m.rhs.find(m.rows[i].first);
    if (it != m.rhs.end()) b[i] = it->second;
  }

  Triplets t(0, 0);
  std::vector<double> cost;
  auto new_column = [&](double c) {
    cost.push_back(c);
    return static_cast<Index>(cost.size()) - 1;
  };
  cost.resize(next_col, 0.0);

  for (size_t jc = 0; jc < m.columns.size(); ++jc) {
    const auto& col = m.columns[jc];
    const auto& rec = map.records[jc];
    switch (rec.kind) {
      case VarMap::Record::Fixed:
        for (const auto& [rname, a] : col.entries) b[row_index[rname]] -= a * rec.shift;
        map.objective_constant += col.objective * rec.shift;
        break;
      case VarMap::Record::Shifted:
        for (const auto& [rname, a] : col.entries) {
          t.add(row_index[rname], rec.col1, a);
          if (rec.shift != 0.0) b[row_index[rname]] -= a * rec.shift;
        }
        cost[rec.col1] = col.objective;
        if (rec.shift != 0.0) map.objective_constant += col.objective * rec.shift;
        break;
      case VarMap::Record::Reflected:
        for (const auto& [rname, a] : col.entries) {
          t.add(row_index[rname], rec.col1, -a);
          b[row_index[rname]] -= a * rec.shift;
        }
        cost[rec.col1] = -col.objective;
        map.objective_constant += col.objective * rec.shift;
        break;
      case VarMap::Record::Split:
        for (const auto& [rname, a] : col.entries) {
          t.add(row_index[rname], rec.col1, a);
          t.add(row_index[rname], rec.col2, -a);
        }
        cost[rec.col1] = col.objective;
        cost[rec.col2] = -col.objective;
        break;
    }
  }

  // inequality rows get a slack column each
  for (Index i = 0; i < num_model_rows; ++i) {
    RowSense s = m.rows[i].second;
    if (s == RowSense::L) {
      Index sc = new_column(0.0);
      t.add(i, sc, 1.0);
      map.slack_cols.push_back(sc);
    } else if (s == RowSense::G) {
      Index sc = new_column(0.0);
      t.add(i, sc, -1.0);
      map.slack_cols.push_back(sc);
    }
  }

  // residual upper bounds become extra rows x' + s = u - l
  Index next_row = num_model_rows;
  for (size_t jc = 0; jc < m.columns.size(); ++jc) {
    const auto& rec = map.records[jc];
    if (rec.kind != VarMap::Record::Shifted) continue;
    LpModel::Bound bnd;
    auto bit = m.bounds.find(rec.name);
    if (bit != m.bounds.end()) bnd = bit->second;
    if (!std::isfinite(bnd.upper)) continue;
    Index row = next_row++;
    Index sc = new_column(0.0);
    t.add(row, rec.col1, 1.0);
    t.add(row, sc, 1.0);
    b.push_back(bnd.upper - bnd.lower);
    map.slack_cols.push_back(sc);
  }

  // drop structurally empty rows (can arise from fixed-variable substitution)
  std::vector<Index> row_nnz(next_row, 0);
  for (const auto& e : t.entries) ++row_nnz[e.row];
  std::vector<Index> row_map(next_row, -1);
  Index kept = 0;
  for (Index i = 0; i < next_row; ++i) {
    if (row_nnz[i] > 0) {
      row_map[i] = kept++;
    } else if (std::abs(b[i]) > 1e-10) {
      throw ModelError("row '" +
                       (i < num_model_rows ? m.rows[i].first : std::string("bound")) +
                       "' became empty with nonzero right-hand side");
    }
  }
  Triplets tc(kept, static_cast<Index>(cost.size()));
  for (const auto& e : t.entries) tc.add(row_map[e.row], e.col, e.value);

  StandardFormLP lp;
  lp.A = from_triplets(tc);
  lp.b = Vector::Zero(kept);
  for (Index i = 0; i < next_row; ++i)
    if (row_map[i] >= 0) lp.b[row_map[i]] = b[i];
  lp.c = Eigen::Map<const Vector>(cost.data(), static_cast<Index>(cost.size()));
  map.std_cols = static_cast<Index>(cost.size());
  return {std::move(lp), std::move(map)};
}

std::map<std::string, double> recover_solution(const VarMap& map,
                                               const Vector& x_std) {
  if (x_std.size() != map.std_cols)
    throw StructuralError("recover_solution: length mismatch");
  std::map<std::string, double> out;
  for (const auto& rec : map.records) {
    switch (rec.kind) {
      case VarMap::Record::Fixed:
        out[rec.name] = rec.shift;
        break;
      case VarMap::Record::Shifted:
        if (rec.col1 >= x_std.size())
          throw StructuralError("recover_solution: vector too short");
        out[rec.name] = rec.shift + x_std[rec.col1];
        break;
      case VarMap::Record::Reflected:
        if (rec.col1 >= x_std.size())
          throw StructuralError("recover_solution: vector too short");
        out[rec.name] = rec.shift - x_std[rec.col1];
        break;
      case VarMap::Record::Split:
        if (rec.col2 >= x_std.size())
          throw StructuralError("recover_solution: vector too short");
        out[rec.name] = x_std[rec.col1] - x_std[rec.col2];
        break;
    }
  }
  return out;
}

}  // namespace augip
