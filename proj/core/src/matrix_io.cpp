#include "dar/matrix_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dar/error.hpp"

namespace dar {

void write_matrix_csv(const Eigen::Ref<const Matrix>& m, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    out << "rows,cols\n" << m.rows() << ',' << m.cols() << '\n';
    char buf[32];
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", m(r, c));
            if (c > 0) out << ',';
            out << buf;
        }
        out << '\n';
    }
    if (!out) throw Error("failed writing '" + path.string() + "'");
}

Matrix read_matrix_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line) || line != "rows,cols") {
        throw InvalidArgument("read_matrix_csv: missing 'rows,cols' header in '" + path.string() + "'");
    }
    long rows = -1;
    long cols = -1;
    char comma = 0;
    if (!std::getline(in, line) || !(std::istringstream(line) >> rows >> comma >> cols) || comma != ',' || rows < 0 ||
        cols < 0) {
        throw InvalidArgument("read_matrix_csv: bad dimension line in '" + path.string() + "'");
    }
    Matrix m(rows, cols);
    for (long r = 0; r < rows; ++r) {
        if (!std::getline(in, line)) throw InvalidArgument("read_matrix_csv: truncated at row " + std::to_string(r));
        std::stringstream ss(line);
        std::string cell;
        long c = 0;
        while (std::getline(ss, cell, ',')) {
            if (c >= cols) throw InvalidArgument("read_matrix_csv: too many columns on row " + std::to_string(r));
            m(r, c++) = std::stod(cell);
        }
        if (c != cols) throw InvalidArgument("read_matrix_csv: too few columns on row " + std::to_string(r));
    }
    return m;
}

}  // namespace dar
