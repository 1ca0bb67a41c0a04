#include "miocp/csv_io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "miocp/errors.hpp"

namespace miocp {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path);
    if (!os) throw ValidationError("cannot open " + path.string() + " for writing");
    os << std::setprecision(17);
    return os;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_double(const std::string& s, std::size_t line_no) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || (end && *end != '\0' && !std::isspace(*end)) || errno == ERANGE)
        throw ValidationError("line " + std::to_string(line_no) + ": '" + s + "' is not a number");
    return v;
}

void write_control_header(std::ostream& os, Eigen::Index n_modes, Eigen::Index n_controls) {
    os << "t_start,t_end";
    for (Eigen::Index i = 0; i < n_modes; ++i) os << ",mode_" << i + 1;
    for (Eigen::Index c = 0; c < n_controls; ++c) os << ",u_" << c + 1;
    os << "\n";
}

}  // namespace

void write_control_csv(const std::filesystem::path& path, const RelaxedControl& rc) {
    std::ofstream os = open_out(path);
    write_control_header(os, rc.n_modes(), rc.n_controls());
    for (std::size_t j = 0; j < rc.grid.cells(); ++j) {
        os << rc.grid.cell_start(j) << "," << rc.grid.cell_end(j);
        for (Eigen::Index i = 0; i < rc.n_modes(); ++i)
            os << "," << rc.alpha(static_cast<Eigen::Index>(j), i);
        for (Eigen::Index c = 0; c < rc.n_controls(); ++c)
            os << "," << rc.omega(static_cast<Eigen::Index>(j), c);
        os << "\n";
    }
}

void write_control_csv(const std::filesystem::path& path, const BinaryControl& bc) {
    std::ofstream os = open_out(path);
    write_control_header(os, bc.n_modes, bc.omega.cols());
    for (std::size_t j = 0; j < bc.mode.size(); ++j) {
        os << bc.grid.cell_start(j) << "," << bc.grid.cell_end(j);
        for (int i = 0; i < bc.n_modes; ++i) os << "," << (bc.mode[j] == i ? 1 : 0);
        for (Eigen::Index c = 0; c < bc.omega.cols(); ++c)
            os << "," << bc.omega(static_cast<Eigen::Index>(j), c);
        os << "\n";
    }
}

RelaxedControl read_control_csv(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ValidationError("cannot open " + path.string());

    std::string line;
    if (!std::getline(is, line)) throw ValidationError("empty control file " + path.string());
    const std::vector<std::string> header = split_csv(line);
    if (header.size() < 3 || header[0] != "t_start" || header[1] != "t_end")
        throw ValidationError("line 1: header must start with t_start,t_end,mode_1");

    std::size_t n_modes = 0, col = 2;
    while (col < header.size() && header[col] == "mode_" + std::to_string(n_modes + 1)) {
        ++n_modes;
        ++col;
    }
    if (n_modes == 0) throw ValidationError("line 1: no mode_1 column found");
    std::size_t n_controls = 0;
    while (col < header.size() && header[col] == "u_" + std::to_string(n_controls + 1)) {
        ++n_controls;
        ++col;
    }
    if (col != header.size())
        throw ValidationError("line 1: unexpected column '" + header[col] + "'");

    std::vector<double> starts, ends;
    std::vector<std::vector<double>> rows;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::vector<std::string> fields = split_csv(line);
        if (fields.size() != header.size())
            throw ValidationError("line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(header.size()) + " columns, got " +
                                  std::to_string(fields.size()));
        std::vector<double> vals(fields.size());
        for (std::size_t f = 0; f < fields.size(); ++f) vals[f] = parse_double(fields[f], line_no);
        starts.push_back(vals[0]);
        ends.push_back(vals[1]);
        rows.push_back(std::move(vals));
    }
    if (rows.empty()) throw ValidationError(path.string() + " has a header but no cells");

    std::vector<double> nodes;
    nodes.push_back(starts[0]);
    for (std::size_t j = 0; j < rows.size(); ++j) {
        if (std::abs(starts[j] - nodes.back()) > 1e-9 * (1.0 + std::abs(nodes.back())))
            throw ValidationError("line " + std::to_string(j + 2) +
                                  ": cell start does not continue the previous cell end");
        nodes.push_back(ends[j]);
    }

    RelaxedControl rc;
    rc.grid = TimeGrid(std::move(nodes));
    rc.alpha.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(n_modes));
    rc.omega.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(n_controls));
    for (std::size_t j = 0; j < rows.size(); ++j) {
        for (std::size_t i = 0; i < n_modes; ++i)
            rc.alpha(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = rows[j][2 + i];
        for (std::size_t c = 0; c < n_controls; ++c)
            rc.omega(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(c)) =
                rows[j][2 + n_modes + c];
    }
    // Validate on a copy so accepted values come back bit-identical to what
    // was printed (canonicalization may nudge a row by an ulp).  Every
    // consumer canonicalizes on entry anyway; cell j lives on line j+2.
    RelaxedControl probe = rc;
    canonicalize_relaxed(probe);
    return rc;
}

void write_history_csv(const std::filesystem::path& path, const DriverResult& result) {
    std::ofstream os = open_out(path);
    os << "k,dt_max,eps_k,J_rel,J_int,rel_error,term_reason\n";
    if (result.history.empty()) return;
    const double j_ref = result.history.back().j_relaxed;
    const double denom = std::max(std::abs(j_ref), 1e-300);
    for (const RunRecord& rec : result.history) {
        os << rec.k << "," << rec.dt_max << "," << rec.eps_k << "," << rec.j_relaxed << ","
           << rec.j_integer << "," << std::abs(j_ref - rec.j_integer) / denom << ","
           << (rec.reason ? stop_reason_label(*rec.reason, result.budget_variant) : "") << "\n";
    }
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
    std::ofstream os = open_out(path);
    os << "t";
    const Eigen::Index dim = traj.states.empty() ? 0 : traj.states.front().size();
    for (Eigen::Index k = 0; k < dim; ++k) os << ",z_" << k + 1;
    os << "\n";
    for (std::size_t s = 0; s < traj.times.size(); ++s) {
        os << traj.times[s];
        for (Eigen::Index k = 0; k < dim; ++k) os << "," << traj.states[s](k);
        os << "\n";
    }
}

void write_trajectory_sidecar(const std::filesystem::path& csv_path, const SemilinearModel& model,
                              const Trajectory& traj) {
    nlohmann::json meta;
    meta["dim"] = model.dim;
    meta["n_modes"] = model.n_modes;
    meta["n_controls"] = model.n_controls;
    meta["nodes"] = traj.times.size();
    meta["accuracy"] = traj.accuracy;
    meta["model"] = model.metadata;
    std::filesystem::path p = csv_path;
    p += ".json";
    std::ofstream os = open_out(p);
    os << meta.dump(2) << "\n";
}

void write_state_norm_csv(const std::filesystem::path& path, const SemilinearModel& model,
                          const Trajectory& traj) {
    std::ofstream os = open_out(path);
    os << "t,norm\n";
    for (std::size_t s = 0; s < traj.times.size(); ++s)
        os << traj.times[s] << "," << model.weighted_norm(traj.states[s]) << "\n";
}

}  // namespace miocp
