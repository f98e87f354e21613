#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "wfcoal/flows.hpp"
#include "wfcoal/rational.hpp"

namespace wfcoal {

// Kernel files: one row per line, whitespace-separated probabilities;
// "a/b" rationals and plain decimals are both accepted. Distribution files
// hold a single such line (or one value per line).
MutationKernel<double> load_kernel(const std::string& path);
MutationKernel<Rat> load_kernel_exact(const std::string& path);
std::vector<double> load_distribution(const std::string& path);
std::vector<Rat> load_distribution_exact(const std::string& path);

// Unique stationary distribution of a finite kernel (dense solve); throws
// when the fixed point is not unique or the solve fails validation.
std::vector<double> kernel_stationary(const MutationKernel<double>& kernel);

// Deterministic formatting used in all emitted files: shortest round-trip
// representation for doubles, "num/den" for rationals.
std::string format_double(double v);

class CsvWriter {
  public:
    explicit CsvWriter(const std::string& path);
    void row(const std::vector<std::string>& fields);
    // flushes and closes; call before comparing outputs byte for byte
    void close();

  private:
    std::ofstream out_;
};

}  // namespace wfcoal
