#ifndef MSML_IO_HPP
#define MSML_IO_HPP

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "msml/correlation.hpp"
#include "msml/posterior.hpp"

namespace msml {

// Ingestion failure; `line` is the 1-based line of the CSV file (0 when the
// problem is not tied to a line, e.g. a missing file or column).
class IngestError : public Error {
 public:
  IngestError(const std::string& what, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line(line) {}
  std::size_t line;
};

enum class CovariateRole { Dummy, Quantitative };

struct Covariate {
  std::string name;
  CovariateRole role = CovariateRole::Quantitative;
};

// Dataset layout. Outcome labels are listed in index order; the last label
// is the base category. The intercept is not listed and is injected as
// covariate 0 on ingest.
struct Schema {
  int periods = 0;
  std::vector<std::string> outcomes;
  std::vector<Covariate> covariates;

  int dim() const { return static_cast<int>(covariates.size()) + 1; }
  int outcome_index(const std::string& label) const;  // -1 if unknown
  // Coefficient label, e.g. "injury:speed" or "injury:const".
  std::string coef_label(int outcome, int covariate) const;

  // Labels y1..yI and covariates x1..x{D-1}.
  static Schema generic(int periods, int outcomes, int dim);
};

// INI layout:
//   [dataset]    periods = 208, outcomes = fatal, injury, pdo
//   [covariates] name = dummy | quantitative   (in column order)
Schema read_schema(const std::string& path);
void write_schema(const std::string& path, const Schema& schema);

struct IngestSummary {
  int periods = 0;
  int outcomes = 0;
  std::size_t records = 0;
  std::vector<std::size_t> per_period;
  std::vector<std::size_t> outcome_counts;
  std::string text() const;
};

// CSV with header: week, outcome, then the schema covariates by name (any
// order; unknown columns are ignored). Weeks are 1-based.
Dataset ingest(std::istream& in, const Schema& schema);
Dataset ingest(const std::string& path, const Schema& schema);
IngestSummary summarize_dataset(const Dataset& data);

void write_dataset_csv(std::ostream& out, const Dataset& data, const Schema& schema);
void write_dataset_csv(const std::string& path, const Dataset& data, const Schema& schema);

struct ParamRow {
  std::string name;
  double estimate = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

// parameter,estimate,lower,upper
void write_param_table(const std::string& path, const std::vector<ParamRow>& rows);
// period,prob,sd   (periods 1-based)
void write_state_series(const std::string& path, const StateSeries& s);
StateSeries read_state_series(const std::string& path);
// chain,draw,loglik,<parameter names...>,p0bar,states  at full precision
void write_draws(const std::string& path, const PosteriorSample& sample,
                 const std::vector<std::string>& names);

// Two-column series CSV: index,value with a header; indexes must run 1..n
// (any row order).
std::vector<double> read_series(const std::string& path);
void write_series(const std::string& path, const std::vector<double>& values,
                  const std::string& value_name = "value");

void write_corr_matrix(const std::string& path, const CorrMatrix& m);

// Rounds to 6 significant digits for reports.
double sig6(double v);

std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace msml

#endif  // MSML_IO_HPP
