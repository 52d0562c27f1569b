#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mpcfl/learner.hpp"

namespace mpcfl {

namespace {

constexpr int kColumns = 122;  // 121 features + label

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

bool parse_double(const std::string& cell, double& out) {
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
    while (end > begin && (end[-1] == ' ' || end[-1] == '\t' || end[-1] == '\r')) --end;
    if (begin == end) return false;
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
}

}  // namespace

Dataset load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);

    std::vector<std::vector<double>> rows;
    std::string line;
    long line_no = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto cells = split_line(line);
        if (static_cast<int>(cells.size()) != kColumns) {
            throw SchemaError(path + ": line " + std::to_string(line_no) + " has " +
                              std::to_string(cells.size()) + " columns, expected " +
                              std::to_string(kColumns));
        }
        std::vector<double> values(kColumns);
        bool ok = true;
        int bad_col = 0;
        for (int c = 0; c < kColumns; ++c) {
            if (!parse_double(cells[static_cast<std::size_t>(c)], values[static_cast<std::size_t>(c)])) {
                ok = false;
                bad_col = c + 1;
                break;
            }
        }
        if (!ok) {
            if (first) {
                first = false;  // a single leading header row is allowed
                continue;
            }
            throw ParseError(path + ": non-numeric cell at line " +
                             std::to_string(line_no) + ", column " +
                             std::to_string(bad_col));
        }
        const double label = values[kColumns - 1];
        if (label != 0.0 && label != 1.0) {
            throw ParseError(path + ": label at line " + std::to_string(line_no) +
                             " must be 0 or 1");
        }
        first = false;
        rows.push_back(std::move(values));
    }

    Dataset d;
    d.features.resize(static_cast<Eigen::Index>(rows.size()), kColumns - 1);
    d.labels.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (int c = 0; c < kColumns - 1; ++c) {
            d.features(static_cast<Eigen::Index>(r), c) = rows[r][static_cast<std::size_t>(c)];
        }
        d.labels[static_cast<Eigen::Index>(r)] = static_cast<int>(rows[r][kColumns - 1]);
    }
    return d;
}

void write_csv(const std::string& path, const Dataset& data) {
    if (data.features.cols() != kColumns - 1) {
        throw SchemaError("write_csv: dataset must have exactly 121 feature columns");
    }
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path);
    for (int c = 1; c <= kColumns - 1; ++c) out << 'f' << c << ',';
    out << "label\n";
    out.precision(17);
    for (Eigen::Index r = 0; r < data.rows(); ++r) {
        for (Eigen::Index c = 0; c < data.features.cols(); ++c) {
            out << data.features(r, c) << ',';
        }
        out << data.labels[r] << '\n';
    }
}

}  // namespace mpcfl
