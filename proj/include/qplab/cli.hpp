#pragma once

#include <string>

namespace qplab::cli {

struct CliOptions {
    std::string config_path;
    std::string out_dir;
    long seed_override = -1;    // >= 0 replaces the config seed
    int threads = 0;            // 0: QPLAB_THREADS env var, then hardware
};

/// Experiment drivers. Each validates the config (unknown keys rejected),
/// runs, writes outputs plus a manifest carrying the config hash and seed,
/// and returns a process exit code (nonzero iff any requested check failed
/// or a computation errored).
int cmd_simulate(const CliOptions& opts);
int cmd_quasipotential(const CliOptions& opts);
int cmd_wgraph(const CliOptions& opts);
int cmd_verify(const CliOptions& opts);
int cmd_action_min(const CliOptions& opts);

/// SHA-256 of the raw config bytes (manifest provenance).
std::string config_hash(const std::string& config_text);

int effective_threads(int requested);

}  // namespace qplab::cli
