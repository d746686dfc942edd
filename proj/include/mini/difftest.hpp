#pragma once

#include "lsq/harness.hpp"
#include "mini/runtime.hpp"

#include <optional>
#include <string>

namespace mini {

// Runs an instance until it stops yielding and collects the remainder of its
// outcome.
RunOutcome drain(Instance &in);

// Resumes a compiled instance `k` times, snapshots it, and checks that the
// original and the copy each produce the oracle's remaining behaviour, both
// when run one after the other and when their resumes are interleaved.
// Returns a description of the first discrepancy.
std::optional<std::string> snapshot_probe(const CompiledProgram &cp, const std::string &entry,
                                          const std::vector<Value> &args, const RunOutcome &oracle, size_t k);

// Compares the reference interpreter on the source and on its normal form
// with the compiled program, with and without the load/store analyses.
// Returns nullopt on agreement; sets `discarded` when the oracle runs out of
// fuel.
std::optional<lsq::DiffFailure> compare_mini(const Program &p, const std::string &entry,
                                             const std::vector<Value> &args, long fuel, uint64_t probe_seed,
                                             bool *discarded = nullptr);

lsq::DiffReport difftest_mini(uint64_t seed, int count, long fuel = 200000);

} // namespace mini
