#pragma once

#include <filesystem>

#include "miocp/driver.hpp"
#include "miocp/model.hpp"
#include "miocp/rounding.hpp"

namespace miocp {

/* Controls travel as CSV with header  t_start,t_end,mode_1..mode_N[,u_1..u_m]
 * and one row per cell.  Values print with max_digits10 so a re-import
 * compares bitwise equal. */
void write_control_csv(const std::filesystem::path& path, const RelaxedControl& rc);
void write_control_csv(const std::filesystem::path& path, const BinaryControl& bc);

/* Binary controls read back as relaxed ones with one-hot rows.  Malformed
 * files raise ValidationError naming the offending line. */
RelaxedControl read_control_csv(const std::filesystem::path& path);

/* Outer-loop history:  k,dt_max,eps_k,J_rel,J_int,rel_error,term_reason.
 * rel_error compares J_int^k against the final relaxed cost, the reference
 * the refinement loop converges toward. */
void write_history_csv(const std::filesystem::path& path, const DriverResult& result);

/* Trajectory rows  t,z_1..z_dim  plus a JSON sidecar (<path>.json) carrying
 * the grid shape and model parameters needed to interpret the useless-alone
 * flat state columns. */
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);
void write_trajectory_sidecar(const std::filesystem::path& csv_path, const SemilinearModel& model,
                              const Trajectory& traj);

/* Weighted state norm per trajectory node:  t,norm. */
void write_state_norm_csv(const std::filesystem::path& path, const SemilinearModel& model,
                          const Trajectory& traj);

}  // namespace miocp
