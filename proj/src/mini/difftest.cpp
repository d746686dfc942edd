#include "mini/difftest.hpp"
#include "mini/generator.hpp"
#include "mini/normalize.hpp"

#include <random>

namespace mini {

RunOutcome drain(Instance &in) {
  RunOutcome out;
  while (in.live && resume_instance(in))
    out.yields.push_back(read_value(in));
  out.result = in.result;
  out.exception = in.exception;
  return out;
}

namespace {

RunOutcome tail_of(const RunOutcome &o, size_t k) {
  RunOutcome t = o;
  t.yields.erase(t.yields.begin(), t.yields.begin() + static_cast<long>(std::min(k, o.yields.size())));
  return t;
}

std::string args_text(const std::vector<Value> &args) {
  std::string s;
  for (size_t i = 0; i < args.size(); ++i)
    s += (i ? "," : "") + args[i].str();
  return s;
}

} // namespace

std::optional<std::string> snapshot_probe(const CompiledProgram &cp, const std::string &entry,
                                          const std::vector<Value> &args, const RunOutcome &oracle, size_t k) {
  k = std::min(k, oracle.yields.size());
  RunOutcome expected = tail_of(oracle, k);
  auto advance = [&]() {
    Instance in = start_instance(cp, entry, args);
    for (size_t i = 0; i < k; ++i)
      resume_instance(in);
    return in;
  };

  // One after the other: finish the original first, then the copy.
  Instance a = advance();
  Instance b = snapshot_instance(a);
  RunOutcome ra = drain(a);
  RunOutcome rb = drain(b);
  if (ra != expected)
    return "original after snapshot at " + std::to_string(k) + ": " + ra.str() + " expected " + expected.str();
  if (rb != expected)
    return "snapshot at " + std::to_string(k) + ": " + rb.str() + " expected " + expected.str();

  // Interleaved: alternate single resumes of the two instances.
  Instance c = advance();
  Instance d = snapshot_instance(c);
  RunOutcome rc, rd;
  while (c.live || d.live) {
    for (auto [in, out] : {std::pair{&c, &rc}, std::pair{&d, &rd}})
      if (in->live && resume_instance(*in))
        out->yields.push_back(read_value(*in));
  }
  for (auto [in, out] : {std::pair{&c, &rc}, std::pair{&d, &rd}}) {
    out->result = in->result;
    out->exception = in->exception;
  }
  if (rc != expected || rd != expected)
    return "interleaved snapshot at " + std::to_string(k) + ": " + rc.str() + " / " + rd.str() + " expected " +
           expected.str();
  return std::nullopt;
}

std::optional<lsq::DiffFailure> compare_mini(const Program &p, const std::string &entry,
                                             const std::vector<Value> &args, long fuel, uint64_t probe_seed,
                                             bool *discarded) {
  if (discarded)
    *discarded = false;
  lsq::DiffFailure f;
  f.program = print_program(p) + "// entry " + entry + "(" + args_text(args) + ")\n";
  RunOutcome oracle;
  try {
    oracle = direct_run(p, entry, args, fuel);
  } catch (const OutOfFuel &) {
    if (discarded)
      *discarded = true;
    return std::nullopt;
  }
  f.source = oracle.str();
  auto fail = [&](const std::string &target, const std::string &why) {
    f.target = target;
    f.divergence = why;
    return f;
  };
  try {
    Program n = normalize(p);
    RunOutcome norm = direct_run(n, entry, args, 4 * fuel + 1000);
    if (norm != oracle)
      return fail(norm.str(), "normal form differs from source");
    CompiledProgram opt = compile(n);
    RunOutcome ro = run_compiled(opt, entry, args, 40 * fuel + 1000);
    if (ro != oracle)
      return fail(ro.str(), "compiled with analyses differs");
    CompiledProgram plain = compile(n, AnalysisOptions::none());
    RunOutcome rp = run_compiled(plain, entry, args, 40 * fuel + 1000);
    if (rp != oracle)
      return fail(rp.str(), "compiled without analyses differs");
    std::mt19937_64 rng(probe_seed);
    size_t k = static_cast<size_t>(rng() % (oracle.yields.size() + 1));
    if (auto why = snapshot_probe(opt, entry, args, oracle, k))
      return fail(ro.str(), *why);
  } catch (const std::exception &e) {
    return fail("error", e.what());
  }
  return std::nullopt;
}

lsq::DiffReport difftest_mini(uint64_t seed, int count, long fuel) {
  lsq::DiffReport r;
  r.seed = seed;
  r.count = count;
  for (int i = 0; i < count; ++i) {
    uint64_t s = seed * 1000003ULL + static_cast<uint64_t>(i);
    GeneratedMini g = gen_mini(s);
    bool discarded = false;
    auto f = compare_mini(g.program, g.entry, g.args, fuel, s, &discarded);
    if (discarded) {
      ++r.discarded;
      continue;
    }
    ++r.compared;
    if (f)
      r.failures.push_back(*f);
  }
  return r;
}

} // namespace mini
