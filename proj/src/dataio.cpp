#include "sssc/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <string_view>

namespace sssc::dataio {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

bool parse_double(std::string_view cell, double& out) {
    cell = trim(cell);
    if (cell.empty()) return false;
    if (cell.front() == '+') cell.remove_prefix(1);
    const char* end = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(cell.data(), end, out);
    return ec == std::errc() && ptr == end;
}

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

Vector gaussian_vector(Index len, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector v(len);
    for (Index i = 0; i < len; ++i) v(i) = normal(rng);
    return v;
}

Vector unit_gaussian_vector(Index len, std::mt19937_64& rng) {
    for (;;) {
        Vector v = gaussian_vector(len, rng);
        const double nrm = v.norm();
        if (nrm > 1e-12) return v / nrm;
    }
}

}  // namespace

DataMatrix load_csv(const std::filesystem::path& path, bool has_header) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());

    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    std::size_t cols = 0;
    bool header_pending = has_header;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        if (header_pending) {
            header_pending = false;
            continue;
        }
        std::vector<double> row;
        std::size_t start = 0;
        for (;;) {
            const auto comma = line.find(',', start);
            const std::string_view cell =
                std::string_view(line).substr(start, comma == std::string::npos ? std::string::npos
                                                                                : comma - start);
            double v = 0.0;
            if (!parse_double(cell, v) || !std::isfinite(v)) {
                std::ostringstream msg;
                msg << path.string() << ": non-numeric cell '" << trim(cell) << "' at row "
                    << rows.size() + 1 << ", column " << row.size() + 1 << " (line " << line_no
                    << ")";
                throw DataError(msg.str());
            }
            row.push_back(v);
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (rows.empty()) {
            cols = row.size();
        } else if (row.size() != cols) {
            std::ostringstream msg;
            msg << path.string() << ": ragged row " << rows.size() + 1 << " has " << row.size()
                << " columns, expected " << cols;
            throw DataError(msg.str());
        }
        rows.push_back(std::move(row));
    }
    if (in.bad()) throw DataError("read failure on " + path.string());
    if (rows.empty()) throw DataError(path.string() + ": no data rows");

    Matrix values(static_cast<Index>(cols), static_cast<Index>(rows.size()));
    for (std::size_t j = 0; j < rows.size(); ++j)
        for (std::size_t i = 0; i < cols; ++i)
            values(static_cast<Index>(i), static_cast<Index>(j)) = rows[j][i];
    return DataMatrix(std::move(values));
}

void save_csv(const std::filesystem::path& path, const DataMatrix& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    const Matrix& v = data.values();
    for (Index j = 0; j < v.cols(); ++j) {
        for (Index i = 0; i < v.rows(); ++i) {
            if (i) out << ',';
            out << format_double(v(i, j));
        }
        out << '\n';
    }
    if (!out) throw DataError("write failure on " + path.string());
}

ClusterAssignment load_labels(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    std::vector<int> labels;
    std::string line;
    std::size_t line_no = 0;
    int max_label = -1;
    while (std::getline(in, line)) {
        ++line_no;
        const auto cell = trim(line);
        if (cell.empty()) continue;
        int v = 0;
        auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
        if (ec != std::errc() || ptr != cell.data() + cell.size() || v < 0)
            throw DataError(path.string() + ": invalid label '" + std::string(cell) +
                            "' on line " + std::to_string(line_no));
        labels.push_back(v);
        max_label = std::max(max_label, v);
    }
    if (in.bad()) throw DataError("read failure on " + path.string());
    return ClusterAssignment(std::move(labels), max_label + 1);
}

void save_labels(const std::filesystem::path& path, const std::vector<int>& labels) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    for (int l : labels) out << l << '\n';
    if (!out) throw DataError("write failure on " + path.string());
}

DataMatrix pca_retain_energy(const DataMatrix& y, double energy) {
    if (!(energy > 0.0 && energy <= 1.0))
        throw UsageError("PCA energy must lie in (0, 1]");

    const Matrix& v = y.values();
    const Vector mean = v.rowwise().mean();
    const Matrix centered = v.colwise() - mean;

    Matrix u;
    Vector s;
    {
        Eigen::BDCSVD<Matrix> svd(centered, Eigen::ComputeThinU);
        u = svd.matrixU();
        s = svd.singularValues();
    }
    if (!u.allFinite() || !s.allFinite()) {
        // divide-and-conquer breakdown; fall back to Jacobi
        Eigen::JacobiSVD<Matrix> svd(centered, Eigen::ComputeThinU);
        u = svd.matrixU();
        s = svd.singularValues();
    }
    if (s.size() == 0 || s(0) == 0.0) throw DataError("PCA: data has no variance");

    const double rank_tol =
        static_cast<double>(std::max(v.rows(), v.cols())) * 1e-15 * s(0);
    Index rank = 0;
    while (rank < s.size() && s(rank) > rank_tol) ++rank;

    const Vector energies = s.head(rank).array().square();
    const double total = energies.sum();
    Index d = rank;
    if (energy < 1.0) {
        double cum = 0.0;
        for (Index i = 0; i < rank; ++i) {
            cum += energies(i);
            if (cum >= energy * total) {
                d = i + 1;
                break;
            }
        }
    }
    return DataMatrix(u.leftCols(d).transpose() * centered);
}

SampleSplit uniform_split(Index n, Index p, std::uint64_t seed) {
    if (p < 1) throw UsageError("in-sample count p must be at least 1");
    if (p > n) throw UsageError("in-sample count p=" + std::to_string(p) +
                                " exceeds sample count n=" + std::to_string(n));

    std::vector<Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), Index{0});
    std::mt19937_64 rng(seed);
    for (Index i = 0; i < p; ++i) {
        std::uniform_int_distribution<Index> pick(i, n - 1);
        std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(pick(rng))]);
    }
    SampleSplit split;
    split.seed = seed;
    split.in_sample.assign(perm.begin(), perm.begin() + p);
    split.out_of_sample.assign(perm.begin() + p, perm.end());
    std::sort(split.in_sample.begin(), split.in_sample.end());
    std::sort(split.out_of_sample.begin(), split.out_of_sample.end());
    return split;
}

Index corrupted_count(Index n, double corrupt_frac) {
    return static_cast<Index>(std::llround(corrupt_frac * static_cast<double>(n)));
}

LabeledDataset synth_subspaces(const SynthParams& params) {
    const int k = params.k;
    if (k < 1) throw UsageError("synth: k must be at least 1");
    if (params.ambient < 1) throw UsageError("synth: ambient dimension must be positive");
    if (static_cast<int>(params.dim_per.size()) != k ||
        static_cast<int>(params.points_per.size()) != k)
        throw UsageError("synth: dim_per and points_per must have k entries");
    if (!(params.noise_sigma >= 0.0)) throw UsageError("synth: noise_sigma must be nonnegative");
    if (!(params.corrupt_frac >= 0.0 && params.corrupt_frac <= 1.0))
        throw UsageError("synth: corrupt_frac must lie in [0, 1]");

    int dim_total = 0;
    Index n = 0;
    for (int i = 0; i < k; ++i) {
        if (params.dim_per[i] < 1) throw UsageError("synth: subspace dimensions must be positive");
        if (params.points_per[i] < params.dim_per[i])
            throw UsageError("synth: subspace " + std::to_string(i) + " has fewer points (" +
                             std::to_string(params.points_per[i]) + ") than its dimension (" +
                             std::to_string(params.dim_per[i]) + ")");
        dim_total += params.dim_per[i];
        n += params.points_per[i];
    }
    if (dim_total > params.ambient)
        throw UsageError("synth: dimension budget exceeded: sum of subspace dimensions " +
                         std::to_string(dim_total) + " > ambient " +
                         std::to_string(params.ambient));

    std::mt19937_64 rng(params.seed);
    const Index amb = params.ambient;

    // Shared random rotation; sign-fixed QR gives a Haar-distributed Q.
    Matrix g(amb, amb);
    for (Index j = 0; j < amb; ++j) g.col(j) = gaussian_vector(amb, rng);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Index j = 0; j < amb; ++j)
        if (r(j, j) < 0.0) q.col(j) = -q.col(j);

    LabeledDataset out;
    out.subspace_dims = params.dim_per;
    Matrix values(amb, n);
    std::vector<int> labels;
    labels.reserve(static_cast<std::size_t>(n));

    Index offset = 0;
    Index col = 0;
    for (int i = 0; i < k; ++i) {
        const Index d = params.dim_per[i];
        Matrix basis = q.middleCols(offset, d);
        offset += d;
        for (int t = 0; t < params.points_per[i]; ++t) {
            values.col(col++) = basis * unit_gaussian_vector(d, rng);
            labels.push_back(i);
        }
        out.bases.push_back(std::move(basis));
    }

    if (params.noise_sigma > 0.0) {
        std::normal_distribution<double> normal(0.0, params.noise_sigma);
        for (Index j = 0; j < n; ++j)
            for (Index i = 0; i < amb; ++i) values(i, j) += normal(rng);
    }

    out.corrupted.assign(static_cast<std::size_t>(n), false);
    const Index n_bad = corrupted_count(n, params.corrupt_frac);
    if (n_bad > 0) {
        std::vector<Index> perm(static_cast<std::size_t>(n));
        std::iota(perm.begin(), perm.end(), Index{0});
        for (Index i = 0; i < n_bad; ++i) {
            std::uniform_int_distribution<Index> pick(i, n - 1);
            std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(pick(rng))]);
        }
        std::sort(perm.begin(), perm.begin() + n_bad);
        for (Index i = 0; i < n_bad; ++i) {
            const Index j = perm[static_cast<std::size_t>(i)];
            values.col(j) = unit_gaussian_vector(amb, rng);
            out.corrupted[static_cast<std::size_t>(j)] = true;
        }
    }

    out.data = DataMatrix(std::move(values));
    out.truth = ClusterAssignment(std::move(labels), k);
    return out;
}

}  // namespace sssc::dataio
