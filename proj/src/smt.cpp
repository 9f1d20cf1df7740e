#include "proberr/smt.hpp"

#include "proberr/fpcore.hpp"

#include <atomic>
#include <cctype>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <csignal>
#include <fcntl.h>
#include <cstring>
#include <fstream>
#include <poll.h>
#include <sstream>
#include <sys/types.h>
#include <sys/wait.h>
#include <thread>
#include <unistd.h>

namespace proberr {

namespace {

double now_s() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

// number | (- e) | (/ e e); anything else (algebraic numbers, approximations) fails
bool parse_value(const std::vector<std::string>& t, std::size_t& i, Rational& out) {
    if (i >= t.size()) return false;
    if (t[i] == "(") {
        if (i + 1 >= t.size()) return false;
        const std::string op = t[i + 1];
        i += 2;
        Rational a, b;
        if (op == "-") {
            if (!parse_value(t, i, a)) return false;
            if (i < t.size() && t[i] != ")") {
                if (!parse_value(t, i, b)) return false;
                a -= b;
            } else {
                a = -a;
            }
        } else if (op == "/") {
            if (!parse_value(t, i, a) || !parse_value(t, i, b) || b == 0) return false;
            a /= b;
        } else {
            return false;
        }
        if (i >= t.size() || t[i] != ")") return false;
        ++i;
        out = a;
        return true;
    }
    const std::string& s = t[i++];
    BigInt num = 0, den = 1;
    bool dot = false, digits = false;
    for (char ch : s) {
        if (ch == '.' && !dot) {
            dot = true;
        } else if (ch >= '0' && ch <= '9') {
            num = num * 10 + (ch - '0');
            if (dot) den *= 10;
            digits = true;
        } else {
            return false;
        }
    }
    if (!digits) return false;
    out = Rational(num, den);
    return true;
}

std::optional<Interval> parse_model_value(const std::string& reply, const std::string& var) {
    std::vector<std::string> t;
    std::string cur;
    for (char ch : reply) {
        if (ch == '(' || ch == ')' || std::isspace(static_cast<unsigned char>(ch))) {
            if (!cur.empty()) t.push_back(cur);
            cur.clear();
            if (ch == '(' || ch == ')') t.emplace_back(1, ch);
        } else {
            cur += ch;
        }
    }
    if (!cur.empty()) t.push_back(cur);
    if (t.size() < 5 || t[0] != "(" || t[1] != "(" || t[2] != var) return std::nullopt;
    std::size_t i = 3;
    Rational v;
    if (!parse_value(t, i, v)) return std::nullopt;
    return Interval{to_double_down(v), to_double_up(v)};
}

}  // namespace

std::string to_string(SatResult r) {
    switch (r) {
        case SatResult::Sat: return "sat";
        case SatResult::Unsat: return "unsat";
        case SatResult::Unknown: return "unknown";
    }
    return "?";
}

Constraint& Constraint::operator+=(const Constraint& o) {
    vars.insert(o.vars.begin(), o.vars.end());
    assertions.insert(assertions.end(), o.assertions.begin(), o.assertions.end());
    return *this;
}

std::string Constraint::to_smtlib() const {
    std::ostringstream os;
    for (const auto& v : vars) os << "(declare-fun " << v << " () Real)\n";
    for (const auto& a : assertions) os << "(assert " << a << ")\n";
    return os.str();
}

std::string smt_number(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("cannot encode a non-finite number");
    Rational r = to_rational(x);
    bool neg = r < 0;
    if (neg) r = -r;
    BigInt num = boost::multiprecision::numerator(r), den = boost::multiprecision::denominator(r);
    std::string s = den == 1 ? num.str() + ".0" : "(/ " + num.str() + ".0 " + den.str() + ".0)";
    return neg ? "(- " + s + ")" : s;
}

std::string smt_in(const std::string& v, Interval iv) {
    return "(and (<= " + smt_number(iv.lo) + " " + v + ") (<= " + v + " " + smt_number(iv.hi) + "))";
}

SolverStats& SolverStats::operator+=(const SolverStats& o) {
    queries += o.queries;
    sat += o.sat;
    unsat += o.unsat;
    unknown += o.unknown;
    restarts += o.restarts;
    seconds += o.seconds;
    return *this;
}

void QueryLog::record(const std::string& query, SatResult r) {
    std::lock_guard<std::mutex> g(mu_);
    entries_.push_back(query + "; => " + to_string(r) + "\n");
}

std::size_t QueryLog::size() const {
    std::lock_guard<std::mutex> g(mu_);
    return entries_.size();
}

std::string QueryLog::text() const {
    std::lock_guard<std::mutex> g(mu_);
    std::string out;
    for (const auto& e : entries_) out += e;
    return out;
}

void QueryLog::dump(const std::string& path) const {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write query log to " + path);
    f << text();
}

SolverSession::SolverSession(SolverConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.cmd.empty()) throw SolverError("no solver command configured");
    std::signal(SIGPIPE, SIG_IGN);
    start();
}

SolverSession::~SolverSession() { stop(); }

void SolverSession::start() {
    const std::string cmdline = "exec " + cfg_.cmd;
    int in[2], out[2];
    if (pipe(in) != 0 || pipe(out) != 0) throw SolverError("pipe() failed: " + std::string(std::strerror(errno)));
    pid_t pid = fork();
    if (pid < 0) throw SolverError("fork() failed: " + std::string(std::strerror(errno)));
    if (pid == 0) {
        dup2(in[0], STDIN_FILENO);
        dup2(out[1], STDOUT_FILENO);
        int devnull = ::open("/dev/null", O_WRONLY);
        if (devnull >= 0) dup2(devnull, STDERR_FILENO);
        close(in[0]);
        close(in[1]);
        close(out[0]);
        close(out[1]);
        execl("/bin/sh", "sh", "-c", cmdline.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }
    close(in[0]);
    close(out[1]);
    pid_ = pid;
    to_child_ = in[1];
    from_child_ = out[0];
    buf_.clear();
}

void SolverSession::stop() {
    if (to_child_ >= 0) close(to_child_);
    if (from_child_ >= 0) close(from_child_);
    to_child_ = from_child_ = -1;
    if (pid_ > 0) {
        kill(pid_, SIGKILL);
        int st = 0;
        waitpid(pid_, &st, 0);
    }
    pid_ = -1;
}

// false on deadline; throws when the solver goes away
bool SolverSession::read_line(std::string& line, double deadline) {
    for (;;) {
        auto nl = buf_.find('\n');
        if (nl != std::string::npos) {
            line = buf_.substr(0, nl);
            buf_.erase(0, nl + 1);
            return true;
        }
        double left = deadline - now_s();
        if (left <= 0) return false;
        pollfd p{from_child_, POLLIN, 0};
        int r = poll(&p, 1, static_cast<int>(std::min(left, 3600.0) * 1000) + 1);
        if (r < 0) {
            if (errno == EINTR) continue;
            throw SolverError("poll() failed");
        }
        if (r == 0) continue;
        char tmp[4096];
        ssize_t n = read(from_child_, tmp, sizeof tmp);
        if (n <= 0) throw SolverError("solver process '" + cfg_.cmd + "' exited unexpectedly");
        buf_.append(tmp, static_cast<std::size_t>(n));
    }
}

SatResult SolverSession::check(const Constraint& c) { return run(c, cfg_.timeout_s, nullptr, nullptr); }

SatResult SolverSession::check(const Constraint& c, double timeout_s) { return run(c, timeout_s, nullptr, nullptr); }

SatResult SolverSession::check(const Constraint& c, const std::string& var, std::optional<Interval>& witness) {
    witness.reset();
    return run(c, cfg_.timeout_s, &var, &witness);
}

SatResult SolverSession::check(const Constraint& c, const std::string& var, std::optional<Interval>& witness,
                               double timeout_s) {
    witness.reset();
    return run(c, std::min(timeout_s, cfg_.timeout_s), &var, &witness);
}

SatResult SolverSession::run(const Constraint& c, double timeout_s, const std::string* var,
                             std::optional<Interval>* witness) {
    if (pid_ < 0) start();
    long ms = std::max(1L, static_cast<long>(timeout_s * 1000));
    std::string body = c.to_smtlib();
    std::string q = "(reset)\n(set-option :timeout " + std::to_string(ms) + ")\n" +
                    (var ? "(set-option :produce-models true)\n" : "") + "(set-logic QF_NRA)\n" + body +
                    "(check-sat)\n";
    double t0 = now_s();
    const char* p = q.data();
    std::size_t left = q.size();
    while (left > 0) {
        ssize_t n = write(to_child_, p, left);
        if (n < 0) {
            if (errno == EINTR) continue;
            throw SolverError("cannot write to solver process '" + cfg_.cmd + "'");
        }
        p += n;
        left -= static_cast<std::size_t>(n);
    }
    SatResult res = SatResult::Unknown;
    double deadline = t0 + timeout_s + cfg_.grace_s + 0.1 * timeout_s;
    std::string line;
    for (;;) {
        if (!read_line(line, deadline)) {
            // the solver ignored its own timeout: start afresh
            stop();
            start();
            stats_.restarts++;
            res = SatResult::Unknown;
            break;
        }
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line == "sat") {
            res = SatResult::Sat;
            break;
        }
        if (line == "unsat") {
            res = SatResult::Unsat;
            break;
        }
        if (line == "unknown" || line == "timeout") {
            res = SatResult::Unknown;
            break;
        }
        if (line.rfind("(error", 0) == 0 && line.find("timeout") == std::string::npos &&
            line.find("set-option") == std::string::npos)
            throw SolverError("solver rejected a query: " + line);
    }
    if (res == SatResult::Sat && var) {
        std::string get = "(get-value (" + *var + "))\n";
        const char* g = get.data();
        std::size_t rem = get.size();
        while (rem > 0) {
            ssize_t n = write(to_child_, g, rem);
            if (n < 0) {
                if (errno == EINTR) continue;
                throw SolverError("cannot write to solver process '" + cfg_.cmd + "'");
            }
            g += n;
            rem -= static_cast<std::size_t>(n);
        }
        std::string reply;
        int depth = 0;
        bool opened = false, ok = true;
        while (ok && !(opened && depth == 0)) {
            if (!read_line(line, deadline)) {
                stop();
                start();
                stats_.restarts++;
                ok = false;
                break;
            }
            for (char ch : line) {
                if (ch == '(') {
                    depth++;
                    opened = true;
                } else if (ch == ')') {
                    depth--;
                }
            }
            reply += line + " ";
        }
        if (ok) *witness = parse_model_value(reply, *var);
    }
    stats_.queries++;
    if (res == SatResult::Sat) stats_.sat++;
    else if (res == SatResult::Unsat) stats_.unsat++;
    else stats_.unknown++;
    stats_.seconds += now_s() - t0;
    if (cfg_.log) cfg_.log->record(body, res);
    return res;
}

SatResult check_sat(SolverSession& s, const Constraint& c) { return s.check(c); }

std::optional<Interval> prune_interval(SolverSession& s, const Constraint& c, const std::string& var, Interval init,
                                       double tol, bool assume_feasible, double time_limit_s) {
    if (init.is_empty()) return std::nullopt;
    const double deadline = now_s() + time_limit_s;
    Constraint base = c;
    base.declare(var);
    base.add(smt_in(var, init));
    std::optional<Interval> w;
    // some feasible value lies in [wlo, whi]; it bounds both searches
    double wlo = init.hi, whi = init.lo;
    auto note = [&](SatResult r) {
        if (r == SatResult::Sat && w) {
            wlo = std::min(wlo, std::max(w->hi, init.lo));
            whi = std::max(whi, std::min(w->lo, init.hi));
        }
        return r;
    };
    if (!assume_feasible) {
        SatResult r = note(s.check(base, var, w));
        if (r == SatResult::Unsat) return std::nullopt;
    }
    // out of time counts as UNKNOWN, which ends a search
    auto ask = [&](const std::string& extra) {
        double left = deadline - now_s();
        if (!(left > 0.001)) return SatResult::Unknown;
        Constraint q = base;
        q.add(extra);
        return note(s.check(q, var, w, left));
    };
    double lo = init.lo, hi = init.hi;
    if (!(tol > 0)) return init;

    // lower endpoint: var <= m UNSAT proves var > m; UNKNOWN ends the search
    if (hi - lo > tol) {
        double probe = lo + tol;
        if (ask("(<= " + var + " " + smt_number(probe) + ")") == SatResult::Unsat) {
            double a = probe, b = std::max(probe, std::min(hi, wlo));
            while (b - a > tol) {
                double m = 0.5 * (a + b);
                if (m <= a || m >= b) break;
                SatResult r = ask("(<= " + var + " " + smt_number(m) + ")");
                if (r == SatResult::Unsat) a = m;
                else if (r == SatResult::Sat) b = std::max(a, std::min(m, wlo));
                else break;
            }
            lo = a;
        }
    }
    if (hi - lo > tol) {
        double probe = hi - tol;
        if (ask("(>= " + var + " " + smt_number(probe) + ")") == SatResult::Unsat) {
            double a = std::min(probe, std::max(lo, whi)), b = probe;
            while (b - a > tol) {
                double m = 0.5 * (a + b);
                if (m <= a || m >= b) break;
                SatResult r = ask("(>= " + var + " " + smt_number(m) + ")");
                if (r == SatResult::Unsat) b = m;
                else if (r == SatResult::Sat) a = std::min(b, std::max(m, whi));
                else break;
            }
            hi = b;
        }
    }
    return Interval{lo, hi};
}

SolverPool::SolverPool(SolverConfig cfg) : cfg_(std::move(cfg)) {
    std::size_t n = std::max<std::size_t>(1, cfg_.workers);
    for (std::size_t i = 0; i < n; ++i) sessions_.push_back(std::make_unique<SolverSession>(cfg_));
}

SolverPool::~SolverPool() = default;

void SolverPool::run(std::size_t n, const std::function<void(std::size_t, SolverSession&)>& task) {
    if (sessions_.size() == 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) task(i, *sessions_[0]);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(sessions_.size());
    for (std::size_t w = 0; w < sessions_.size(); ++w) {
        threads.emplace_back([&, w] {
            try {
                for (std::size_t i = next++; i < n; i = next++) task(i, *sessions_[w]);
            } catch (...) {
                errors[w] = std::current_exception();
                next = n;
            }
        });
    }
    for (auto& t : threads) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

SolverStats SolverPool::stats() const {
    SolverStats s;
    for (const auto& x : sessions_) s += x->stats();
    return s;
}

}  // namespace proberr
