#pragma once

#include <unistd.h>

#include <Eigen/Dense>
#include <cstdio>
#include <fstream>
#include <random>
#include <string>

namespace testutil {

inline Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, uint64_t seed,
                                     double sd = 1.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, sd);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = gauss(rng);
    return m;
}

inline Eigen::MatrixXd centered(Eigen::MatrixXd m) {
    m.rowwise() -= m.colwise().mean().eval();
    return m;
}

/// Writes content to a unique temp file and returns its path.
class TempFile {
  public:
    explicit TempFile(const std::string& content, const std::string& tag = "t") {
        static int counter = 0;
        path_ = std::string("/tmp/anchormva_test_") + tag + "_" +
                std::to_string(::getpid()) + "_" + std::to_string(counter++) + ".csv";
        std::ofstream out(path_);
        out << content;
    }
    ~TempFile() { std::remove(path_.c_str()); }
    const std::string& path() const { return path_; }

  private:
    std::string path_;
};

}  // namespace testutil
