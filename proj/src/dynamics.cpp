#include "kvn/dynamics.hpp"
#include "kvn/random.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace kvn {

// ---- hyper-dual numbers: f + a e1 + b e2 + ab e1 e2 with e1^2 = e2^2 = 0

namespace {

struct HD {
    double f = 0, a = 0, b = 0, ab = 0;
};

HD operator+(HD x, HD y) { return {x.f + y.f, x.a + y.a, x.b + y.b, x.ab + y.ab}; }
HD operator-(HD x, HD y) { return {x.f - y.f, x.a - y.a, x.b - y.b, x.ab - y.ab}; }
HD operator-(HD x) { return {-x.f, -x.a, -x.b, -x.ab}; }
HD operator*(HD x, HD y) {
    return {x.f * y.f, x.f * y.a + x.a * y.f, x.f * y.b + x.b * y.f,
            x.f * y.ab + x.a * y.b + x.b * y.a + x.ab * y.f};
}
// g(x) for a scalar function with derivatives d0, d1, d2 at x.f
HD chain(HD x, double d0, double d1, double d2) {
    return {d0, d1 * x.a, d1 * x.b, d1 * x.ab + d2 * x.a * x.b};
}
HD recip(HD x) {
    double v = 1.0 / x.f;
    return chain(x, v, -v * v, 2 * v * v * v);
}
HD operator/(HD x, HD y) { return x * recip(y); }

// ---- expression tree

struct Node {
    enum Kind { num, var, add, sub, mul, div, neg, pow, sin, cos, exp } kind;
    double value = 0;
    int var_index = 0;
    int exponent = 0;
    std::shared_ptr<Node> l, r;
};
using NodeP = std::shared_ptr<Node>;

NodeP make(Node::Kind k, NodeP l = nullptr, NodeP r = nullptr) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->l = std::move(l);
    n->r = std::move(r);
    return n;
}

bool is_constant(const NodeP& n) {
    if (!n) return true;
    if (n->kind == Node::var) return false;
    return is_constant(n->l) && is_constant(n->r);
}

template <class T>
T ipow(T x, int e) {
    if (e < 0) return T{1} / ipow(x, -e);
    T r{1};
    for (int k = 0; k < e; ++k) r = r * x;
    return r;
}
template <>
HD ipow(HD x, int e) {
    if (e < 0) return recip(ipow(x, -e));
    HD r{1, 0, 0, 0};
    for (int k = 0; k < e; ++k) r = r * x;
    return r;
}

double eval(const Node& n, const std::vector<double>& x);
HD eval(const Node& n, const std::vector<HD>& x);

double eval(const Node& n, const std::vector<double>& x) {
    switch (n.kind) {
        case Node::num: return n.value;
        case Node::var: return x[n.var_index];
        case Node::add: return eval(*n.l, x) + eval(*n.r, x);
        case Node::sub: return eval(*n.l, x) - eval(*n.r, x);
        case Node::mul: return eval(*n.l, x) * eval(*n.r, x);
        case Node::div: return eval(*n.l, x) / eval(*n.r, x);
        case Node::neg: return -eval(*n.l, x);
        case Node::pow: return ipow(eval(*n.l, x), n.exponent);
        case Node::sin: return std::sin(eval(*n.l, x));
        case Node::cos: return std::cos(eval(*n.l, x));
        case Node::exp: return std::exp(eval(*n.l, x));
    }
    return 0;
}

HD eval(const Node& n, const std::vector<HD>& x) {
    switch (n.kind) {
        case Node::num: return {n.value, 0, 0, 0};
        case Node::var: return x[n.var_index];
        case Node::add: return eval(*n.l, x) + eval(*n.r, x);
        case Node::sub: return eval(*n.l, x) - eval(*n.r, x);
        case Node::mul: return eval(*n.l, x) * eval(*n.r, x);
        case Node::div: return eval(*n.l, x) / eval(*n.r, x);
        case Node::neg: return -eval(*n.l, x);
        case Node::pow: return ipow(eval(*n.l, x), n.exponent);
        case Node::sin: {
            HD u = eval(*n.l, x);
            return chain(u, std::sin(u.f), std::cos(u.f), -std::sin(u.f));
        }
        case Node::cos: {
            HD u = eval(*n.l, x);
            return chain(u, std::cos(u.f), -std::sin(u.f), -std::cos(u.f));
        }
        case Node::exp: {
            HD u = eval(*n.l, x);
            double e = std::exp(u.f);
            return chain(u, e, e, e);
        }
    }
    return {};
}

class Parser {
public:
    Parser(const std::string& s, int n) : s_(s), n_(n) {}

    NodeP parse() {
        NodeP e = expr();
        skip();
        if (pos_ != s_.size()) throw ParseError("unexpected '" + std::string(1, s_[pos_]) + "'", pos_);
        return e;
    }

private:
    const std::string& s_;
    int n_;
    std::size_t pos_ = 0;

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool accept(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodeP expr() {
        NodeP l = term();
        for (;;) {
            if (accept('+')) l = make(Node::add, l, term());
            else if (accept('-')) l = make(Node::sub, l, term());
            else return l;
        }
    }
    NodeP term() {
        NodeP l = unary();
        for (;;) {
            if (accept('*')) l = make(Node::mul, l, unary());
            else if (accept('/')) l = make(Node::div, l, unary());
            else return l;
        }
    }
    NodeP unary() {
        if (accept('-')) return make(Node::neg, unary());
        if (accept('+')) return unary();
        return power();
    }
    NodeP power() {
        NodeP base = primary();
        skip();
        std::size_t at = pos_;
        if (!accept('^')) return base;
        NodeP ex = unary();
        if (!is_constant(ex)) throw ParseError("non-integer exponent", at);
        double v = eval(*ex, std::vector<double>{});
        if (v != std::round(v) || std::abs(v) > 1e6) throw ParseError("non-integer exponent", at);
        NodeP p = make(Node::pow, base);
        p->exponent = static_cast<int>(v);
        return p;
    }
    NodeP primary() {
        skip();
        if (pos_ >= s_.size()) throw ParseError("unexpected end of expression", pos_);
        char c = s_[pos_];
        if (accept('(')) {
            NodeP e = expr();
            if (!accept(')')) throw ParseError("expected ')'", pos_);
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* begin = s_.c_str() + pos_;
            char* end = nullptr;
            double v = std::strtod(begin, &end);
            if (end == begin) throw ParseError("bad number", pos_);
            pos_ += static_cast<std::size_t>(end - begin);
            NodeP n = make(Node::num);
            n->value = v;
            return n;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
            std::string id = s_.substr(start, pos_ - start);
            if (id == "sin" || id == "cos" || id == "exp") {
                if (!accept('(')) throw ParseError("expected '(' after " + id, pos_);
                NodeP arg = expr();
                if (!accept(')')) throw ParseError("expected ')'", pos_);
                Node::Kind k = id == "sin" ? Node::sin : id == "cos" ? Node::cos : Node::exp;
                return make(k, arg);
            }
            NodeP v = make(Node::var);
            v->var_index = variable(id, start);
            return v;
        }
        throw ParseError("unexpected '" + std::string(1, c) + "'", pos_);
    }
    int variable(const std::string& id, std::size_t at) const {
        if (n_ == 1 && id == "q") return 0;
        if (n_ == 1 && id == "p") return 1;
        if (id.size() >= 2 && (id[0] == 'q' || id[0] == 'p')) {
            bool digits = true;
            for (std::size_t k = 1; k < id.size(); ++k) digits = digits && std::isdigit(static_cast<unsigned char>(id[k]));
            if (digits) {
                int k = std::stoi(id.substr(1));
                if (k >= 1 && k <= n_) return (id[0] == 'q' ? 0 : n_) + k - 1;
            }
        }
        throw ParseError("unknown identifier '" + id + "'", at);
    }
};

void check_dim(const PhasePoint& x, int n) {
    if (x.size() != 2 * n) throw Error("phase point has wrong dimension");
}

void check_finite(const RVec& v) {
    if (!v.allFinite()) throw Error("non-finite state encountered");
}

}  // namespace

// ---- model

HamiltonianModel::HamiltonianModel(int n_pairs, ScalarFn h, VectorFn grad, MatrixFn hess, std::string provenance)
    : n_(n_pairs), h_(std::move(h)), grad_(std::move(grad)), hess_(std::move(hess)), provenance_(std::move(provenance)) {
    if (n_pairs < 1) throw Error("model needs at least one degree of freedom");
}

double HamiltonianModel::evaluate(const PhasePoint& x) const {
    check_dim(x, n_);
    return h_(x);
}

RVec HamiltonianModel::gradient(const PhasePoint& x) const {
    check_dim(x, n_);
    return grad_(x);
}

RMat HamiltonianModel::hessian(const PhasePoint& x) const {
    check_dim(x, n_);
    RMat h = hess_(x);
    double asym = (h - h.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-8 * std::max(1.0, h.cwiseAbs().maxCoeff())) throw Error("Hessian is not symmetric");
    return 0.5 * (h + h.transpose());
}

namespace {

// Separable quadratic-plus-quartic family: sum_i p_i^2/(2m) + k q_i^2/2 + l q_i^4/4.
HamiltonianModel separable(int n, double m, double k, double l, std::string name) {
    auto h = [=](const PhasePoint& x) {
        double s = 0;
        for (int i = 0; i < n; ++i) {
            double q = x(i), p = x(n + i);
            s += p * p / (2 * m) + k * q * q / 2 + l * q * q * q * q / 4;
        }
        return s;
    };
    auto g = [=](const PhasePoint& x) {
        RVec r(2 * n);
        for (int i = 0; i < n; ++i) {
            double q = x(i);
            r(i) = k * q + l * q * q * q;
            r(n + i) = x(n + i) / m;
        }
        return r;
    };
    auto hs = [=](const PhasePoint& x) {
        RMat r = RMat::Zero(2 * n, 2 * n);
        for (int i = 0; i < n; ++i) {
            r(i, i) = k + 3 * l * x(i) * x(i);
            r(n + i, n + i) = 1 / m;
        }
        return r;
    };
    return HamiltonianModel(n, h, g, hs, std::move(name));
}

}  // namespace

HamiltonianModel harmonic_model(int n, double m, double w) {
    if (m <= 0) throw Error("mass must be positive");
    return separable(n, m, m * w * w, 0, "harmonic(m=" + std::to_string(m) + ",w=" + std::to_string(w) + ")");
}

HamiltonianModel inverted_model(int n) { return separable(n, 1, -1, 0, "inverted"); }

HamiltonianModel free_model(int n) { return separable(n, 1, 0, 0, "free"); }

HamiltonianModel quartic_model(int n, double lambda4) {
    return separable(n, 1, 0, lambda4, "quartic(lambda4=" + std::to_string(lambda4) + ")");
}

HamiltonianModel parse_hamiltonian(const std::string& text, int n) {
    if (n < 1) throw Error("model needs at least one degree of freedom");
    NodeP root = Parser(text, n).parse();
    const int N = 2 * n;
    auto seeded = [=](const PhasePoint& x, int a, int b) {
        std::vector<HD> v(N);
        for (int k = 0; k < N; ++k) v[k] = {x(k), 0, 0, 0};
        if (a >= 0) v[a].a = 1;
        if (b >= 0) v[b].b = 1;
        return eval(*root, v);
    };
    auto h = [root](const PhasePoint& x) { return eval(*root, std::vector<double>(x.data(), x.data() + x.size())); };
    auto g = [=](const PhasePoint& x) {
        RVec r(N);
        for (int a = 0; a < N; ++a) r(a) = seeded(x, a, -1).a;
        return r;
    };
    auto hs = [=](const PhasePoint& x) {
        RMat r(N, N);
        for (int a = 0; a < N; ++a)
            for (int b = a; b < N; ++b) r(a, b) = r(b, a) = seeded(x, a, b).ab;
        return r;
    };
    return HamiltonianModel(n, h, g, hs, "parsed(" + text + ")");
}

HamiltonianModel make_model(const std::string& text, int n, double m, double w, double lambda4) {
    if (text == "harmonic") return harmonic_model(n, m, w);
    if (text == "inverted") return inverted_model(n);
    if (text == "free") return free_model(n);
    if (text == "quartic") return quartic_model(n, lambda4);
    return parse_hamiltonian(text, n);
}

// ---- flows

RMat symplectic_form(int n) {
    RMat w = RMat::Zero(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
        w(i, n + i) = 1;
        w(n + i, i) = -1;
    }
    return w;
}

RVec hamilton_vector_field(const HamiltonianModel& model, const PhasePoint& x) {
    int n = model.n_pairs();
    RVec g = model.gradient(x), r(2 * n);
    r.head(n) = g.tail(n);
    r.tail(n) = -g.head(n);
    return r;
}

RMat jacobi_generator(const HamiltonianModel& model, const PhasePoint& x) {
    return symplectic_form(model.n_pairs()) * model.hessian(x);
}

StepPlan plan_steps(double t, double dt) {
    if (!(dt > 0)) throw Error("dt must be positive");
    if (t < 0) throw Error("t must be non-negative");
    long steps = static_cast<long>(std::ceil(t / dt - 1e-9));
    if (steps == 0) return {0, 0.0};
    return {steps, t / double(steps)};
}

namespace {

// RK4 step for the combined state (phi, X) with X' = M(phi) X.
void rk4_jacobi(const HamiltonianModel& m, PhasePoint& phi, RMat& X, double h) {
    auto f = [&](const PhasePoint& p) { return hamilton_vector_field(m, p); };
    auto M = [&](const PhasePoint& p) { return jacobi_generator(m, p); };
    RVec k1 = f(phi);
    RMat l1 = M(phi) * X;
    PhasePoint p2 = phi + 0.5 * h * k1;
    RVec k2 = f(p2);
    RMat l2 = M(p2) * (X + 0.5 * h * l1);
    PhasePoint p3 = phi + 0.5 * h * k2;
    RVec k3 = f(p3);
    RMat l3 = M(p3) * (X + 0.5 * h * l2);
    PhasePoint p4 = phi + h * k3;
    RVec k4 = f(p4);
    RMat l4 = M(p4) * (X + h * l3);
    phi += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    X += h / 6 * (l1 + 2 * l2 + 2 * l3 + l4);
    check_finite(phi);
    if (!X.allFinite()) throw Error("non-finite state encountered");
}

}  // namespace

Trajectory flow(const HamiltonianModel& model, const PhasePoint& phi0, double t, double dt) {
    check_dim(phi0, model.n_pairs());
    StepPlan plan = plan_steps(t, dt);
    Trajectory tr;
    PhasePoint x = phi0;
    auto f = [&](const PhasePoint& p) { return hamilton_vector_field(model, p); };
    double e0 = model.evaluate(x);
    auto record = [&](double time) {
        tr.t.push_back(time);
        tr.phi.push_back(x);
        double e = model.evaluate(x);
        tr.energy.push_back(e);
        double drift = std::abs(e - e0) / (e0 != 0 ? std::abs(e0) : 1.0);
        tr.energy_drift = std::max(tr.energy_drift, drift);
    };
    record(0);
    double h = plan.h;
    for (long k = 0; k < plan.steps; ++k) {
        RVec k1 = f(x);
        RVec k2 = f(x + 0.5 * h * k1);
        RVec k3 = f(x + 0.5 * h * k2);
        RVec k4 = f(x + h * k3);
        x += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
        check_finite(x);
        record(double(k + 1) * h);
    }
    return tr;
}

JacobiState monodromy(const HamiltonianModel& model, const PhasePoint& phi0, double t, double dt) {
    check_dim(phi0, model.n_pairs());
    StepPlan plan = plan_steps(t, dt);
    JacobiState s{phi0, RMat::Identity(phi0.size(), phi0.size()), 0.0};
    for (long k = 0; k < plan.steps; ++k) rk4_jacobi(model, s.phi, s.monodromy, plan.h);
    s.t = plan.steps ? t : 0.0;
    return s;
}

double lyapunov(const HamiltonianModel& model, const PhasePoint& phi0, double T, double dt, double renorm_interval) {
    check_dim(phi0, model.n_pairs());
    if (!(renorm_interval > dt) || !(T >= renorm_interval)) throw Error("need T >= renorm_interval > dt");
    long chunks = static_cast<long>(std::round(T / renorm_interval));
    double chunk = T / double(chunks);
    StepPlan plan = plan_steps(chunk, dt);
    PhasePoint phi = phi0;
    RMat v = RMat::Constant(phi0.size(), 1, 1.0 / std::sqrt(double(phi0.size())));
    double sum = 0;
    for (long c = 0; c < chunks; ++c) {
        for (long k = 0; k < plan.steps; ++k) rk4_jacobi(model, phi, v, plan.h);
        double nv = v.norm();
        if (!(nv > 0) || !std::isfinite(nv)) throw Error("non-finite growth");
        sum += std::log(nv);
        v /= nv;
    }
    return sum / T;
}

LyapunovEnsemble lyapunov_monte_carlo(const HamiltonianModel& model, int samples, std::uint64_t seed, double box,
                                      double T, double dt, double renorm_interval) {
    if (samples < 1) throw Error("need at least one sample");
    Rng gen(seed);
    LyapunovEnsemble out;
    const int N = 2 * model.n_pairs();
    for (int s = 0; s < samples; ++s) {
        PhasePoint x(N);
        for (int a = 0; a < N; ++a) x(a) = box * (2 * uniform01(gen) - 1);
        out.starts.push_back(x);
    }
    // orbits are independent; evaluation order does not affect the result
    for (const auto& x : out.starts) out.estimates.push_back(lyapunov(model, x, T, dt, renorm_interval));
    for (double e : out.estimates) out.mean += e;
    out.mean /= samples;
    return out;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& tr, int n) {
    os << "t";
    for (int i = 1; i <= n; ++i) os << ",q" << i;
    for (int i = 1; i <= n; ++i) os << ",p" << i;
    os << ",energy\n";
    char buf[64];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        os << buf;
    };
    for (std::size_t k = 0; k < tr.t.size(); ++k) {
        put(tr.t[k]);
        for (int a = 0; a < 2 * n; ++a) {
            os << ',';
            put(tr.phi[k](a));
        }
        os << ',';
        put(tr.energy[k]);
        os << '\n';
    }
}

}  // namespace kvn
