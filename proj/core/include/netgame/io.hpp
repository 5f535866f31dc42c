#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "netgame/game.hpp"

namespace netgame {

// Thrown on malformed input files; carries the path and the offending
// 1-based line number (0 when the file could not be opened at all).
struct CsvError : std::runtime_error {
  CsvError(const std::string& path, int line, const std::string& what)
      : std::runtime_error(path + (line > 0 ? ":" + std::to_string(line) : "") + ": " + what),
        path(path),
        line(line) {}
  std::string path;
  int line;
};

enum class MissingPolicy {
  Error,  // reject empty cells
  Zero,   // read empty cells as 0
};

// Edge lists use the header "src,dst"; a row "i,j" makes j a friend of
// i.  Ids on disk are 1-based.
DirectedNetwork load_edges(const std::string& path, int num_players);
void save_edges(const std::string& path, const DirectedNetwork& net);

// Covariate tables use the header "id,<name>,<name>,..."; ids must be a
// permutation of 1..n.  Rows may appear in any order.
struct CovariateTable {
  Eigen::MatrixXd x;
  std::vector<std::string> names;
};
CovariateTable load_covariates(const std::string& path,
                               MissingPolicy missing = MissingPolicy::Error);
void save_covariates(const std::string& path, const Eigen::MatrixXd& x,
                     const std::vector<std::string>& names);

// Outcome files use the header "id,y" with actions in 0..K.
std::vector<int> load_outcomes(const std::string& path, int num_players);
void save_outcomes(const std::string& path, const std::vector<int>& y);

// Choice probabilities: header "id,p0,p1,...,pK".
ChoiceProfile load_profile(const std::string& path);
void save_profile(const std::string& path, const ChoiceProfile& profile);

// Shortest decimal form that round-trips a double exactly (17
// significant digits); used for all floating-point output.
std::string format_double(double value);

// Canonical coefficient names in packed-theta order:
// beta_<k>_<covariate>, alpha_<k>_<l> for actions k and friend actions l.
std::vector<std::string> param_names(int num_actions, const std::vector<std::string>& covariates);

}  // namespace netgame
