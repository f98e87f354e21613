#include "wfcoal/io.hpp"

#include <Eigen/Dense>

#include <charconv>
#include <sstream>
#include <stdexcept>

namespace wfcoal {

namespace {

std::vector<std::vector<std::string>> load_tokens(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] == '#') continue;
        std::istringstream ls(line);
        std::vector<std::string> toks;
        std::string t;
        while (ls >> t) toks.push_back(t);
        if (!toks.empty()) rows.push_back(std::move(toks));
    }
    if (rows.empty()) throw std::runtime_error("empty input: " + path);
    return rows;
}

}  // namespace

MutationKernel<Rat> load_kernel_exact(const std::string& path) {
    MutationKernel<Rat> kernel;
    for (const auto& toks : load_tokens(path)) {
        std::vector<Rat> row;
        for (const auto& t : toks) row.push_back(parse_rat(t));
        kernel.rows.push_back(std::move(row));
    }
    kernel.validate();
    return kernel;
}

MutationKernel<double> load_kernel(const std::string& path) {
    auto exact = load_kernel_exact(path);
    MutationKernel<double> kernel;
    for (const auto& row : exact.rows) {
        std::vector<double> drow;
        for (const auto& v : row) drow.push_back(to_double(v));
        kernel.rows.push_back(std::move(drow));
    }
    kernel.validate();
    return kernel;
}

std::vector<Rat> load_distribution_exact(const std::string& path) {
    std::vector<Rat> out;
    for (const auto& toks : load_tokens(path))
        for (const auto& t : toks) out.push_back(parse_rat(t));
    Rat sum = 0;
    for (const auto& v : out) {
        if (v < 0) throw std::runtime_error("distribution entry < 0 in " + path);
        sum += v;
    }
    if (sum != Rat(1)) {
        double d = to_double(sum);
        if (std::abs(d - 1.0) > 1e-12) throw std::runtime_error("distribution does not sum to 1 in " + path);
    }
    return out;
}

std::vector<double> load_distribution(const std::string& path) {
    std::vector<double> out;
    for (const auto& v : load_distribution_exact(path)) out.push_back(to_double(v));
    return out;
}

std::vector<double> kernel_stationary(const MutationKernel<double>& kernel) {
    kernel.validate();
    const int e = kernel.type_count();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(e, e);
    for (int x = 0; x < e; ++x)
        for (int y = 0; y < e; ++y) a(y, x) = kernel.rows[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)];
    Eigen::MatrixXd lhs = a - Eigen::MatrixXd::Identity(e, e);
    lhs.row(e - 1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(e);
    rhs(e - 1) = 1.0;
    Eigen::VectorXd sol = lhs.fullPivLu().solve(rhs);
    std::vector<double> mu(static_cast<std::size_t>(e));
    double check = 0;
    for (int x = 0; x < e; ++x) {
        if (sol(x) < -1e-12) throw std::runtime_error("kernel_stationary: negative fixed point (kernel degenerate?)");
        mu[static_cast<std::size_t>(x)] = std::max(sol(x), 0.0);
        check += mu[static_cast<std::size_t>(x)];
    }
    for (auto& v : mu) v /= check;
    // residual validation
    for (int y = 0; y < e; ++y) {
        double img = 0;
        for (int x = 0; x < e; ++x) img += mu[static_cast<std::size_t>(x)] * kernel.rows[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)];
        if (std::abs(img - mu[static_cast<std::size_t>(y)]) > 1e-10)
            throw std::runtime_error("kernel_stationary: fixed point residual too large (kernel degenerate?)");
    }
    return mu;
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw std::runtime_error("format_double failed");
    return std::string(buf, ptr);
}

CsvWriter::CsvWriter(const std::string& path) : out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot open for write: " + path);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out_ << ',';
        out_ << fields[i];
    }
    out_ << '\n';
}

void CsvWriter::close() {
    out_.flush();
    out_.close();
}

}  // namespace wfcoal
