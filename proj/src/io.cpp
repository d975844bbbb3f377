#include "msml/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace msml {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && std::isfinite(out);
}

bool parse_int(const std::string& s, long& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtol(s.c_str(), &end, 10);
  return end == s.c_str() + s.size();
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << std::setprecision(17);
  return out;
}

}  // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char c = line[k];
    if (quoted) {
      if (c == '"' && k + 1 < line.size() && line[k + 1] == '"') {
        cur += '"';
        ++k;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(trim(cur));
  return fields;
}

int Schema::outcome_index(const std::string& label) const {
  for (std::size_t i = 0; i < outcomes.size(); ++i)
    if (outcomes[i] == label) return static_cast<int>(i);
  return -1;
}

std::string Schema::coef_label(int outcome, int covariate) const {
  const std::string o = outcome >= 0 && outcome < static_cast<int>(outcomes.size())
                            ? outcomes[static_cast<std::size_t>(outcome)]
                            : "y" + std::to_string(outcome + 1);
  const std::string c = covariate == 0 ? "const"
                        : covariate <= static_cast<int>(covariates.size())
                            ? covariates[static_cast<std::size_t>(covariate - 1)].name
                            : "x" + std::to_string(covariate);
  return o + ":" + c;
}

Schema Schema::generic(int periods, int outcomes, int dim) {
  Schema s;
  s.periods = periods;
  for (int i = 0; i < outcomes; ++i) s.outcomes.push_back("y" + std::to_string(i + 1));
  for (int d = 1; d < dim; ++d) s.covariates.push_back({"x" + std::to_string(d), CovariateRole::Quantitative});
  return s;
}

Schema read_schema(const std::string& path) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(path, tree);
  } catch (const pt::ini_parser_error& e) {
    throw IngestError("schema: " + std::string(e.what()));
  }
  Schema s;
  const auto periods = tree.get_optional<int>("dataset.periods");
  if (!periods || *periods < 1) throw IngestError("schema: [dataset] periods must be a positive integer");
  s.periods = *periods;
  const auto labels = tree.get_optional<std::string>("dataset.outcomes");
  if (!labels) throw IngestError("schema: [dataset] outcomes is missing");
  for (const std::string& l : split_csv_line(*labels))
    if (!l.empty()) s.outcomes.push_back(l);
  if (s.outcomes.size() < 2) throw IngestError("schema: need at least two outcome labels");
  for (std::size_t i = 0; i < s.outcomes.size(); ++i)
    for (std::size_t j = i + 1; j < s.outcomes.size(); ++j)
      if (s.outcomes[i] == s.outcomes[j]) throw IngestError("schema: duplicate outcome label '" + s.outcomes[i] + "'");
  if (const auto cov = tree.get_child_optional("covariates")) {
    for (const auto& [name, node] : *cov) {
      const std::string role = lower(trim(node.data()));
      if (role == "dummy")
        s.covariates.push_back({name, CovariateRole::Dummy});
      else if (role == "quantitative")
        s.covariates.push_back({name, CovariateRole::Quantitative});
      else
        throw IngestError("schema: covariate '" + name + "' has unknown role '" + role + "'");
    }
  }
  return s;
}

void write_schema(const std::string& path, const Schema& schema) {
  std::ofstream out = open_out(path);
  out << "[dataset]\nperiods = " << schema.periods << "\noutcomes = ";
  for (std::size_t i = 0; i < schema.outcomes.size(); ++i) out << (i ? ", " : "") << schema.outcomes[i];
  out << "\n\n[covariates]\n";
  for (const auto& c : schema.covariates)
    out << c.name << " = " << (c.role == CovariateRole::Dummy ? "dummy" : "quantitative") << "\n";
}

Dataset ingest(std::istream& in, const Schema& schema) {
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw IngestError("empty file: header is mandatory");
  ++lineno;
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const auto header = split_csv_line(line);
  auto column = [&](const std::string& name) -> std::size_t {
    for (std::size_t k = 0; k < header.size(); ++k)
      if (header[k] == name) return k;
    throw IngestError("missing column '" + name + "'", 1);
  };
  const std::size_t week_col = column("week");
  const std::size_t outcome_col = column("outcome");
  std::vector<std::size_t> cov_cols;
  for (const auto& c : schema.covariates) cov_cols.push_back(column(c.name));

  std::vector<Record> records;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != header.size())
      throw IngestError("expected " + std::to_string(header.size()) + " fields, found " +
                            std::to_string(f.size()),
                        lineno);
    Record r;
    long week = 0;
    if (!parse_int(f[week_col], week)) throw IngestError("week '" + f[week_col] + "' is not an integer", lineno);
    if (week < 1 || week > schema.periods)
      throw IngestError("week " + std::to_string(week) + " outside [1," + std::to_string(schema.periods) + "]",
                        lineno);
    r.period = static_cast<int>(week - 1);
    r.outcome = schema.outcome_index(f[outcome_col]);
    if (r.outcome < 0) throw IngestError("unknown outcome label '" + f[outcome_col] + "'", lineno);
    r.x.reserve(cov_cols.size() + 1);
    r.x.push_back(1.0);
    for (std::size_t c = 0; c < cov_cols.size(); ++c) {
      const std::string& cell = f[cov_cols[c]];
      double v = 0.0;
      if (!parse_double(cell, v))
        throw IngestError("column '" + schema.covariates[c].name + "': '" + cell + "' is not a number", lineno);
      if (schema.covariates[c].role == CovariateRole::Dummy && v != 0.0 && v != 1.0)
        throw IngestError("dummy column '" + schema.covariates[c].name + "' must be 0 or 1", lineno);
      r.x.push_back(v);
    }
    records.push_back(std::move(r));
  }
  return Dataset(schema.periods, static_cast<int>(schema.outcomes.size()), schema.dim(), records);
}

Dataset ingest(const std::string& path, const Schema& schema) {
  std::ifstream in(path);
  if (!in) throw IngestError("cannot open '" + path + "'");
  return ingest(in, schema);
}

IngestSummary summarize_dataset(const Dataset& data) {
  IngestSummary s;
  s.periods = data.periods();
  s.outcomes = data.outcomes();
  s.records = data.size();
  for (int t = 0; t < data.periods(); ++t) s.per_period.push_back(data.count_in_period(t));
  s.outcome_counts = data.outcome_counts();
  return s;
}

std::string IngestSummary::text() const {
  std::ostringstream os;
  os << "T=" << periods << " I=" << outcomes << " N=" << records << " outcomes=";
  for (std::size_t i = 0; i < outcome_counts.size(); ++i) os << (i ? "/" : "") << outcome_counts[i];
  if (!per_period.empty()) {
    const auto [mn, mx] = std::minmax_element(per_period.begin(), per_period.end());
    os << " N_t in [" << *mn << "," << *mx << "]";
    // Coarse histogram of N_t in five equal-width bins.
    const double w = std::max<double>(1.0, static_cast<double>(*mx - *mn + 1) / 5.0);
    std::vector<int> bins(5, 0);
    for (std::size_t n : per_period)
      ++bins[std::min<std::size_t>(4, static_cast<std::size_t>(static_cast<double>(n - *mn) / w))];
    os << " hist=";
    for (std::size_t b = 0; b < bins.size(); ++b) os << (b ? "," : "") << bins[b];
  }
  return os.str();
}

void write_dataset_csv(std::ostream& out, const Dataset& data, const Schema& schema) {
  if (schema.dim() != data.dim() || static_cast<int>(schema.outcomes.size()) != data.outcomes())
    throw DimensionError("schema does not match dataset dimensions");
  out << std::setprecision(17) << "week,outcome";
  for (const auto& c : schema.covariates) out << "," << c.name;
  out << "\n";
  for (std::size_t n = 0; n < data.size(); ++n) {
    out << data.period(n) + 1 << "," << schema.outcomes[static_cast<std::size_t>(data.outcome(n))];
    const auto x = data.covariates(n);
    for (std::size_t d = 1; d < x.size(); ++d) out << "," << x[d];
    out << "\n";
  }
}

void write_dataset_csv(const std::string& path, const Dataset& data, const Schema& schema) {
  std::ofstream out = open_out(path);
  write_dataset_csv(out, data, schema);
}

void write_param_table(const std::string& path, const std::vector<ParamRow>& rows) {
  std::ofstream out = open_out(path);
  out << std::setprecision(6) << "parameter,estimate,lower,upper\n";
  for (const auto& r : rows) out << r.name << "," << r.estimate << "," << r.lower << "," << r.upper << "\n";
}

void write_state_series(const std::string& path, const StateSeries& s) {
  std::ofstream out = open_out(path);
  out << std::setprecision(6) << "period,prob,sd\n";
  for (std::size_t t = 0; t < s.prob.size(); ++t) out << t + 1 << "," << s.prob[t] << "," << s.sd[t] << "\n";
}

StateSeries read_state_series(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IngestError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw IngestError("empty state-series file: header is mandatory");
  StateSeries s;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto f = split_csv_line(line);
    long t = 0;
    double p = 0.0, sd = 0.0;
    if (f.size() != 3 || !parse_int(f[0], t) || !parse_double(f[1], p) || !parse_double(f[2], sd))
      throw IngestError("expected period,prob,sd", lineno);
    if (t != static_cast<long>(s.prob.size() + 1)) throw IngestError("periods must be consecutive from 1", lineno);
    s.prob.push_back(p);
    s.sd.push_back(sd);
  }
  return s;
}

void write_draws(const std::string& path, const PosteriorSample& sample,
                 const std::vector<std::string>& names) {
  const auto refs = continuous_parameters(sample.spec);
  if (names.size() != refs.size()) throw DimensionError("write_draws: one name per parameter required");
  std::ofstream out = open_out(path);
  out << "chain,draw,loglik";
  for (const auto& n : names) out << "," << n;
  if (sample.spec.switching) out << ",states";
  out << "\n";
  for (std::size_t c = 0; c < sample.chains.size(); ++c) {
    const auto& draws = sample.chains[c].draws;
    for (std::size_t k = 0; k < draws.size(); ++k) {
      out << c + 1 << "," << k + 1 << "," << draws[k].loglik;
      for (const auto& r : refs) out << "," << param_value(draws[k].theta, r);
      if (sample.spec.switching) {
        out << ",";
        for (auto s : draws[k].theta.states) out << static_cast<char>('0' + s);
      }
      out << "\n";
    }
  }
}

std::vector<double> read_series(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IngestError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw IngestError("empty series file: header is mandatory");
  std::vector<std::pair<long, double>> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 2) throw IngestError("series rows need exactly two fields", lineno);
    long idx = 0;
    double v = 0.0;
    if (!parse_int(f[0], idx)) throw IngestError("index '" + f[0] + "' is not an integer", lineno);
    if (!parse_double(f[1], v)) throw IngestError("value '" + f[1] + "' is not a number", lineno);
    rows.emplace_back(idx, v);
  }
  std::sort(rows.begin(), rows.end());
  std::vector<double> out;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (rows[k].first != static_cast<long>(k + 1))
      throw IngestError("series indexes must run 1.." + std::to_string(rows.size()) + " without gaps or repeats");
    out.push_back(rows[k].second);
  }
  return out;
}

void write_series(const std::string& path, const std::vector<double>& values,
                  const std::string& value_name) {
  std::ofstream out = open_out(path);
  out << "week," << value_name << "\n";
  for (std::size_t t = 0; t < values.size(); ++t) out << t + 1 << "," << values[t] << "\n";
}

void write_corr_matrix(const std::string& path, const CorrMatrix& m) {
  std::ofstream out = open_out(path);
  out << std::setprecision(6) << "series";
  for (const auto& c : m.col_names) out << "," << c;
  out << "\n";
  for (std::size_t r = 0; r < m.row_names.size(); ++r) {
    out << m.row_names[r];
    for (double v : m.values[r]) out << "," << v;
    out << "\n";
  }
}

double sig6(double v) {
  if (!std::isfinite(v) || v == 0.0) return v;
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return std::stod(os.str());
}

}  // namespace msml
