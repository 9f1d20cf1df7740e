#ifndef PROBERR_SMT_HPP
#define PROBERR_SMT_HPP

#include "proberr/interval.hpp"

#include <cmath>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace proberr {

enum class SatResult { Sat, Unsat, Unknown };
std::string to_string(SatResult r);

// The solver process failed (could not start, died, or spoke garbage).
class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& w) : std::runtime_error(w) {}
};

// Conjunction of SMT-LIB assertions over real-valued constants.
struct Constraint {
    std::set<std::string> vars;
    std::vector<std::string> assertions;

    void declare(const std::string& v) { vars.insert(v); }
    void add(std::string a) { assertions.push_back(std::move(a)); }
    Constraint& operator+=(const Constraint& o);
    std::string to_smtlib() const;
};

// exact decimal-free rendering of a double, e.g. (/ 3 4) or (- (/ 1 8))
std::string smt_number(double x);
// (and (<= lo v) (<= v hi))
std::string smt_in(const std::string& v, Interval iv);

struct SolverStats {
    long queries = 0;
    long sat = 0;
    long unsat = 0;
    long unknown = 0;
    long restarts = 0;
    double seconds = 0;

    SolverStats& operator+=(const SolverStats& o);
};

// Thread-safe audit log of queries and replies.
class QueryLog {
public:
    void record(const std::string& query, SatResult r);
    std::size_t size() const;
    void dump(const std::string& path) const;
    std::string text() const;

private:
    mutable std::mutex mu_;
    std::vector<std::string> entries_;
};

struct SolverConfig {
    std::string cmd = "z3 -in";
    double timeout_s = 60.0;
    // extra wall-clock allowance before a silent solver is killed
    double grace_s = 2.0;
    std::size_t workers = 1;
    std::shared_ptr<QueryLog> log;
};

// One child process speaking SMT-LIB 2 over pipes. Each query starts with
// (reset), so queries never see each other's declarations.
class SolverSession {
public:
    explicit SolverSession(SolverConfig cfg);
    ~SolverSession();
    SolverSession(const SolverSession&) = delete;
    SolverSession& operator=(const SolverSession&) = delete;

    SatResult check(const Constraint& c);
    SatResult check(const Constraint& c, double timeout_s);
    // On SAT, also asks for var's model value; witness receives an enclosure
    // of it when the solver reports a rational.
    SatResult check(const Constraint& c, const std::string& var, std::optional<Interval>& witness);
    SatResult check(const Constraint& c, const std::string& var, std::optional<Interval>& witness, double timeout_s);
    const SolverStats& stats() const { return stats_; }
    const SolverConfig& config() const { return cfg_; }

private:
    void start();
    void stop();
    bool read_line(std::string& line, double deadline);
    SatResult run(const Constraint& c, double timeout_s, const std::string* var, std::optional<Interval>* witness);

    SolverConfig cfg_;
    int pid_ = -1;
    int to_child_ = -1;
    int from_child_ = -1;
    std::string buf_;
    SolverStats stats_;
};

SatResult check_sat(SolverSession& s, const Constraint& c);

// Shrinks init around every model value of var; nullopt when c together with
// var in init is unsatisfiable. Each endpoint first probes at distance tol and
// then bisects; only UNSAT answers move an endpoint, while model values of SAT
// answers shrink the remaining search range. After time_limit_s seconds the
// search stops and keeps what it has proved so far.
std::optional<Interval> prune_interval(SolverSession& s, const Constraint& c, const std::string& var, Interval init,
                                       double tol, bool assume_feasible = false, double time_limit_s = HUGE_VAL);

// Fixed set of sessions; task i runs on some worker and writes only its own
// output slot, so merged results do not depend on scheduling.
class SolverPool {
public:
    explicit SolverPool(SolverConfig cfg);
    ~SolverPool();
    void run(std::size_t n, const std::function<void(std::size_t, SolverSession&)>& task);
    SolverStats stats() const;
    const SolverConfig& config() const { return cfg_; }

private:
    SolverConfig cfg_;
    std::vector<std::unique_ptr<SolverSession>> sessions_;
};

}  // namespace proberr

#endif
