// csv.hpp — CSV emission with resolved-config headers, and an index-ordered parallel map

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <json.hpp>

#include "somc/error.hpp"

namespace somc {

inline std::string format_double(double x) {
    if (!std::isfinite(x)) fail(ErrorKind::NonFiniteOutput, "non-finite value in output");
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

using Cell = std::variant<double, long long, std::string>;

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

    void add(std::vector<Cell> row) {
        if (row.size() != columns_.size())
            fail(ErrorKind::DimensionMismatch, "row has " + std::to_string(row.size()) + " cells, table has " +
                                                   std::to_string(columns_.size()) + " columns");
        rows_.push_back(std::move(row));
    }

    const std::vector<std::string>& columns() const { return columns_; }
    std::size_t rows() const { return rows_.size(); }

    // Every cell is formatted before the file is opened, so a NaN leaves no partial output.
    std::string render(const nlohmann::json& config, const std::string& version) const {
        std::string out = "# " + version + "\n# config: " + config.dump() + "\n";
        for (std::size_t c = 0; c < columns_.size(); ++c) out += (c ? "," : "") + columns_[c];
        out += '\n';
        for (const auto& row : rows_) {
            for (std::size_t c = 0; c < row.size(); ++c) {
                if (c) out += ',';
                const auto& v = row[c];
                if (const double* d = std::get_if<double>(&v)) {
                    if (!std::isfinite(*d))
                        fail(ErrorKind::NonFiniteOutput, "column '" + columns_[c] + "' holds a non-finite value");
                    out += format_double(*d);
                } else if (const long long* i = std::get_if<long long>(&v)) {
                    out += std::to_string(*i);
                } else {
                    out += std::get<std::string>(v);
                }
            }
            out += '\n';
        }
        return out;
    }

    void write(const std::string& path, const nlohmann::json& config, const std::string& version) const {
        const std::string text = render(config, version);
        std::ofstream f(path, std::ios::binary);
        if (!f) fail(ErrorKind::ValidationError, "cannot write '" + path + "'");
        f << text;
    }

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<Cell>> rows_;
};

inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

// Results land at their input index, so output order never depends on scheduling.
// The first exception (lowest index) is rethrown after all workers finish.
template <class F>
auto parallel_map(int count, int threads, F&& f) -> std::vector<decltype(f(0))> {
    using R = decltype(f(0));
    std::vector<R> out(count);
    std::vector<std::exception_ptr> errs(count);
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next++; i < count; i = next++) {
            try {
                out[i] = f(i);
            } catch (...) {
                errs[i] = std::current_exception();
            }
        }
    };
    const int n = std::min(std::max(1, threads), std::max(1, count));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
    return out;
}

} // namespace somc
