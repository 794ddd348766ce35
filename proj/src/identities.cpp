#include "kvn/identities.hpp"

#include <algorithm>
#include <functional>

namespace kvn {

Multivector eigen_ket(const AlgebraDescriptor& alg, const std::vector<Slot>& slots) {
    if (int(slots.size()) != alg.n_state) throw Error("eigen_ket: one slot per generator");
    Mask base = 0;
    ParamOperator gen;
    for (int a = 0; a < alg.n_state; ++a) {
        const Slot& s = slots[a];
        if (s.minus) base |= Mask{1} << a;
        if (s.x.terms().empty()) continue;
        CMat op = s.minus ? contraction_op(alg, a).matrix : wedge_op(alg, a).matrix;
        gen.terms.push_back({-s.x, op});
    }
    return exp_apply(gen, Multivector::monomial(alg, base));
}

ResolutionResult resolve_identity(const Metric& m, const Multivector& ket, const Multivector& bra_ket,
                                  const std::vector<int>& bits, cplx prefactor) {
    const auto& alg = ket.algebra();
    int N = alg.fiber_dim();
    ResolutionResult out;
    out.matrix = CMat::Zero(N, N);
    double leftover = 0;
    for (int j = 0; j < N; ++j) {
        Multivector ej = Multivector::monomial(alg, static_cast<Mask>(j));
        Multivector s = inner(m, bra_ket, ej);
        Multivector v(alg);
        for (int i = 0; i < N; ++i) {
            Multivector ki = ket.coefficient(i);
            if (ki.is_zero()) continue;
            v += Multivector::monomial(alg, static_cast<Mask>(i)) * (ki * s);
        }
        v = berezin_integrate(v, bits) * prefactor;
        for (auto& [mask, z] : v.terms()) {
            if (mask & ~alg.state_bits()) leftover = std::max(leftover, std::abs(z));
            else out.matrix(mask, j) += z;
        }
    }
    out.deviation = std::max(leftover, (out.matrix - CMat::Identity(N, N)).cwiseAbs().maxCoeff());
    return out;
}

namespace {

// Parameter bookkeeping for the tables: up to eight named odd variables.
struct Vars {
    AlgebraDescriptor alg;
    explicit Vars(AlgebraDescriptor a) : alg(std::move(a)) {}
    Multivector v(int k) const { return Multivector::param(alg, k); }
    Multivector s(int k) const { return Multivector::pstar(alg, k); }
    Multivector c(cplx z) const { return Multivector::scalar(alg, z); }
    Multivector ex(const Multivector& x) const { return exp_nilpotent(x); }
    Multivector ket(std::initializer_list<Slot> sl) const { return eigen_ket(alg, sl); }
};

Slot M(const Multivector& x) { return {true, x}; }
Slot P(const Multivector& x) { return {false, x}; }

class Suite {
public:
    explicit Suite(const IdentityOptions& o) : opt_(o) {}

    Metric metric(Metric builtin) const {
        for (auto& m : opt_.overrides)
            if (m.family == builtin.family && m.g.rows() == builtin.g.rows()) return m;
        return builtin;
    }

    void check(const std::string& group, const std::string& name, double dev) {
        IdentityResult r{group, name, dev, dev < opt_.tol};
        rep_.results.push_back(r);
        rep_.max_deviation = std::max(rep_.max_deviation, dev);
        rep_.all_pass = rep_.all_pass && r.pass;
    }
    void table(const std::string& group, const std::string& name, const Metric& m, const Multivector& phi,
               const Multivector& psi, const Multivector& rhs) {
        check(group, name, inner(m, phi, psi).max_abs_diff(rhs));
    }
    void resolution(const std::string& group, const std::string& name, const Metric& m, const Multivector& ket,
                    const Multivector& bra, const std::vector<int>& bits, cplx pref) {
        check(group, name, resolve_identity(m, ket, bra, bits, pref).deviation);
    }
    // a negative control: must NOT reconstruct the identity
    void must_fail(const std::string& group, const std::string& name, const Metric& m, const Multivector& ket,
                   const Multivector& bra, const std::vector<int>& bits, cplx pref) {
        double d = resolve_identity(m, ket, bra, bits, pref).deviation;
        check(group, name, d > 0.5 ? 0.0 : 1.0);
    }

    IdentityReport report() const { return rep_; }

private:
    IdentityOptions opt_;
    IdentityReport rep_;
};

void single_generator(Suite& st) {
    Vars V(AlgebraDescriptor::single_mode(2));
    auto alg = V.alg;
    auto a = V.v(0), b = V.v(1), as = V.s(0);
    const int ab = alg.param_bit(0);
    Metric svh = st.metric(svh_metric(AlgebraDescriptor::single_mode()));
    Metric gau = st.metric(gauge_metric(AlgebraDescriptor::single_mode()));
    auto km = [&](const Multivector& x) { return V.ket({M(x)}); };
    auto kp = [&](const Multivector& x) { return V.ket({P(x)}); };

    const std::string g1 = "svh one variable";
    st.table(g1, "(|a->,|b->) = exp(a* b)", svh, km(a), km(b), V.ex(V.s(0) * b));
    st.table(g1, "(|a+>,|b+>) = exp(a* b)", svh, kp(a), kp(b), V.ex(V.s(0) * b));
    st.table(g1, "(|a+>,|b->) = a* - b", svh, kp(a), km(b), V.s(0) - b);
    st.table(g1, "(|a->,|b+>) = -(a* - b)", svh, km(a), kp(b), -(V.s(0) - b));
    st.resolution(g1, "-int da |a+><-a*| = 1", svh, kp(a), km(as), {ab}, -1.0);
    st.resolution(g1, "-int da |a-><+a*| = 1", svh, km(a), kp(as), {ab}, -1.0);

    const std::string g2 = "gauge one variable";
    st.table(g2, "(|a+>,|b+>) = -(a* - b)", gau, kp(a), kp(b), -(V.s(0) - b));
    st.table(g2, "(|a->,|b->) = a* - b", gau, km(a), km(b), V.s(0) - b);
    st.table(g2, "(|a+>,|b->) = exp(a* b)", gau, kp(a), km(b), V.ex(V.s(0) * b));
    st.table(g2, "(|a->,|b+>) = exp(a* b)", gau, km(a), kp(b), V.ex(V.s(0) * b));
    st.resolution(g2, "-int da |a+><+a*| = 1", gau, kp(a), kp(as), {ab}, -1.0);
    st.resolution(g2, "-int da |a-><-a*| = 1", gau, km(a), km(as), {ab}, -1.0);
}

void two_generators(Suite& st) {
    Vars V(AlgebraDescriptor::phase_space(1, 8));
    auto alg = V.alg;
    // aq ap bq bp aq' ap' bq' bp'
    auto aq = V.v(0), ap = V.v(1), bq = V.v(2), bp = V.v(3);
    auto aq2 = V.v(4), ap2 = V.v(5), bq2 = V.v(6), bp2 = V.v(7);
    auto aqs = V.s(0), aps = V.s(1), bqs = V.s(2), bps = V.s(3);
    auto aq2s = V.s(4), ap2s = V.s(5);
    auto d = [](const Multivector& x) { return x; };  // delta(x) = x
    const cplx i = I;
    const auto a1 = AlgebraDescriptor::phase_space(1);
    Metric svh = st.metric(svh_metric(a1));
    Metric gau = st.metric(gauge_metric(a1));
    Metric sym = st.metric(symplectic_metric(a1));
    const int Baq = alg.param_bit(0), Bap = alg.param_bit(1);

    const std::string g1 = "svh two variables";
    st.table(g1, "(|aq-,ap->,|bq-,bp->) = exp(aq* bq + ap* bp)", svh, V.ket({M(aq), M(ap)}), V.ket({M(bq), M(bp)}),
             V.ex(aqs * bq + aps * bp));
    st.table(g1, "(|aq*+,ap*+>,|bq-,bp->) = d(aq-bq) d(ap-bp)", svh, V.ket({P(aqs), P(aps)}),
             V.ket({M(bq), M(bp)}), d(aq - bq) * d(ap - bp));
    st.table(g1, "(|aq*-,ap*->,|bq+,bp+>) = -d(aq-bq) d(ap-bp)", svh, V.ket({M(aqs), M(aps)}),
             V.ket({P(bq), P(bp)}), -(d(aq - bq) * d(ap - bp)));
    st.resolution(g1, "int daq dap |aq+,ap+><-ap*,-aq*| = 1", svh, V.ket({P(aq), P(ap)}),
                  V.ket({M(aqs), M(aps)}), {Baq, Bap}, 1.0);
    st.resolution(g1, "int dap daq |aq-,ap-><+ap*,+aq*| = 1", svh, V.ket({M(aq), M(ap)}),
                  V.ket({P(aqs), P(aps)}), {Bap, Baq}, 1.0);

    const std::string g2 = "gauge two variables";
    auto m00 = V.ket({M(aq), M(ap)});
    auto bpp = V.ket({P(bq), P(bp)});
    st.table(g2, "(|aq-,ap->,|bq+,bp+>) = i exp(aq* bq + ap* bp)", gau, m00, bpp, V.ex(aqs * bq + aps * bp) * i);
    st.table(g2, "(|aq-,ap->,|aq'-,bp+>) = i d(aq*-aq') exp(ap* bp)", gau, m00, V.ket({M(aq2), P(bp)}),
             d(aqs - aq2) * V.ex(aps * bp) * i);
    st.table(g2, "(|aq-,ap->,|bq+,ap'->) = i d(ap*-ap') exp(aq* bq)", gau, m00, V.ket({P(bq), M(ap2)}),
             d(aps - ap2) * V.ex(aqs * bq) * i);
    st.table(g2, "(|aq-,ap->,|aq'-,ap'->) = i d(aq*-aq') d(ap*-ap')", gau, m00, V.ket({M(aq2), M(ap2)}),
             d(aqs - aq2) * d(aps - ap2) * i);
    auto bpp0 = V.ket({P(bq), P(bp)});
    auto bq2s = V.s(6);
    (void)bq2s;
    st.table(g2, "(|bq+,bp+>,|aq-,bp'+>) = i d(bp*-bp') exp(bq* aq)", gau, bpp0, V.ket({M(aq), P(bp2)}),
             d(bps - bp2) * V.ex(bqs * aq) * i);
    st.table(g2, "(|bq+,bp+>,|bq'+,ap->) = i d(bq'-bq*) exp(bp* ap)", gau, bpp0, V.ket({P(bq2), M(ap)}),
             d(bq2 - bqs) * V.ex(bps * ap) * i);
    st.table(g2, "(|bq+,bp+>,|bq'+,bp'+>) = i d(bq*-bq') d(bp*-bp')", gau, bpp0, V.ket({P(bq2), P(bp2)}),
             d(bqs - bq2) * d(bps - bp2) * i);
    st.table(g2, "(|bq+,bp+>,|aq-,ap->) = -i exp(bq* aq + bp* ap)", gau, bpp0, m00,
             V.ex(bqs * aq + bps * ap) * (-i));
    st.resolution(g2, "i int daq dap |aq+,ap+><+ap*,+aq*| = 1", gau, V.ket({P(aq), P(ap)}),
                  V.ket({P(aqs), P(aps)}), {Baq, Bap}, i);
    st.resolution(g2, "i int daq dap |aq-,ap-><-ap*,-aq*| = 1", gau, V.ket({M(aq), M(ap)}),
                  V.ket({M(aqs), M(aps)}), {Baq, Bap}, i);

    const std::string g3 = "symplectic two variables";
    st.table(g3, "(|aq-,ap->,|aq'-,ap'->) = -exp(-i aq* ap' + i ap* aq')", sym, m00, V.ket({M(aq2), M(ap2)}),
             -V.ex((aqs * ap2) * (-i) + (aps * aq2) * i));
    st.table(g3, "(|aq-,bp+>,|bq+,bp'+>) = i d(bp' + i aq*) exp(i bq bp*)", sym, V.ket({M(aq), P(bp)}),
             V.ket({P(bq), P(bp2)}), d(bp2 + aqs * i) * V.ex(bq * bps * i) * i);
    st.table(g3, "(|aq-,ap->,|bq+,ap'->) = d(bq - i ap*) exp(i ap' aq*)", sym, m00, V.ket({P(bq), M(ap2)}),
             d(bq - aps * i) * V.ex(ap2 * aqs * i));
    st.table(g3, "(|aq-,ap->,|bq+,bp+>) = d(bq - i ap*) d(bp + i aq*)", sym, m00, bpp,
             d(bq - aps * i) * d(bp + aqs * i));
    st.table(g3, "(|aq-,ap->,|aq'-,bp+>) = -d(bp + i aq*) exp(-i aq' ap*)", sym, m00, V.ket({M(aq2), P(bp)}),
             -(d(bp + aqs * i) * V.ex(aq2 * aps * (-i))));
    st.table(g3, "(|bq+,ap->,|bq'+,bp+>) = -i d(bq' - i ap*) exp(-i bp bq*)", sym, V.ket({P(bq), M(ap)}),
             V.ket({P(bq2), P(bp)}), d(bq2 - aps * i) * V.ex(bp * bqs * (-i)) * (-i));
    st.table(g3, "(|bq+,ap->,|aq-,bp+>) = -i exp(i bq* bp + i ap* aq)", sym, V.ket({P(bq), M(ap)}),
             V.ket({M(aq), P(bp)}), V.ex(bqs * bp * i + aps * aq * i) * (-i));
    st.table(g3, "(|bq+,ap->,|bq'+,ap'->) = d(ap* + i bq') d(ap' - i bq*)", sym, V.ket({P(bq), M(ap)}),
             V.ket({P(bq2), M(ap2)}), d(aps + bq2 * i) * d(ap2 - bqs * i));
    st.table(g3, "(|aq-,bp+>,|aq'-,bp'+>) = d(aq' + i bp*) d(i bp' - aq*)", sym, V.ket({M(aq), P(bp)}),
             V.ket({M(aq2), P(bp2)}), d(aq2 + bps * i) * d(bp2 * i - aqs));
    st.table(g3, "(|aq'-,ap'->,|aq-,ap->) = -exp(-i aq'* ap + i ap'* aq)", sym, V.ket({M(aq2), M(ap2)}), m00,
             -V.ex((aq2s * ap) * (-i) + (ap2s * aq) * i));
    st.table(g3, "(|bq+,bp+>,|bq'+,bp'+>) = exp(i bq* bp' - i bp* bq')", sym, bpp0, V.ket({P(bq2), P(bp2)}),
             V.ex(bqs * bp2 * i - bps * bq2 * i));
    st.resolution(g3, "int dap daq |aq-,ap-><(i ap*)+,(-i aq*)+| = 1", sym, m00,
                  V.ket({P(aps * i), P(aqs * (-i))}), {Bap, Baq}, 1.0);
    st.resolution(g3, "int dap daq |aq+,ap+><(-i ap*)-,(i aq*)-| = 1", sym, V.ket({P(aq), P(ap)}),
                  V.ket({M(aps * (-i)), M(aqs * i)}), {Bap, Baq}, 1.0);

    // bra entries are written reversed for svh/gauge, in place for symplectic
    const std::string g4 = "bra entry order";
    st.must_fail(g4, "svh without entry reversal fails", svh, V.ket({P(aq), P(ap)}),
                 V.ket({M(aps), M(aqs)}), {Baq, Bap}, 1.0);
    st.must_fail(g4, "symplectic with entry reversal fails", sym, m00, V.ket({P(aqs * (-i)), P(aps * i)}),
                 {Bap, Baq}, 1.0);

    // basis entries of the metrics
    const std::string g5 = "basis products";
    auto basis = [&](Mask mk) { return Multivector::monomial(alg, mk); };
    auto sc = [&](cplx z) { return V.c(z); };
    st.table(g5, "gauge (|0-,0->,|0+,0+>) = i", gau, basis(3), basis(0), sc(i));
    st.table(g5, "gauge (|0+,0+>,|0-,0->) = -i", gau, basis(0), basis(3), sc(-i));
    st.table(g5, "gauge (|0-,0+>,|0+,0->) = -i", gau, basis(1), basis(2), sc(-i));
    st.table(g5, "gauge (|0+,0->,|0-,0+>) = i", gau, basis(2), basis(1), sc(i));
    st.table(g5, "symplectic (|0+,0+>,|0+,0+>) = 1", sym, basis(0), basis(0), sc(1.0));
    st.table(g5, "symplectic (|0-,0->,|0-,0->) = -1", sym, basis(3), basis(3), sc(-1.0));
    st.table(g5, "symplectic (|0-,0+>,|0+,0->) = i", sym, basis(1), basis(2), sc(i));
    st.table(g5, "symplectic (|0+,0->,|0-,0+>) = -i", sym, basis(2), basis(1), sc(-i));
}

void four_generators(Suite& st) {
    Vars V(AlgebraDescriptor::phase_space(2, 8));
    auto alg = V.alg;
    const auto a2 = AlgebraDescriptor::phase_space(2);
    Metric svh = st.metric(svh_metric(a2));
    Metric gau = st.metric(gauge_metric(a2));
    Metric sym = st.metric(symplectic_metric(a2));
    std::vector<Multivector> a, as, b;
    for (int k = 0; k < 4; ++k) {
        a.push_back(V.v(k));
        as.push_back(V.s(k));
        b.push_back(V.v(4 + k));
    }
    auto ket = [&](bool minus, const std::vector<Multivector>& x) {
        std::vector<Slot> sl;
        for (auto& e : x) sl.push_back({minus, e});
        return eigen_ket(alg, sl);
    };
    Multivector sum(alg), deltas = V.c(1.0);
    for (int k = 0; k < 4; ++k) {
        sum += as[k] * b[k];
        deltas = deltas * (a[k] - b[k]);
    }
    std::vector<int> bits{alg.param_bit(0), alg.param_bit(1), alg.param_bit(2), alg.param_bit(3)};
    std::vector<int> rbits(bits.rbegin(), bits.rend());

    const std::string g1 = "svh four variables";
    st.table(g1, "(|a1-..a4->,|b1-..b4->) = exp(sum a* b)", svh, ket(true, a), ket(true, b), V.ex(sum));
    st.table(g1, "(|a1*+..a4*+>,|b1-..b4->) = prod d(a-b)", svh, ket(false, as), ket(true, b), deltas);
    // reordering m odd factors gives (-1)^{m(m+1)/2}: -, -, + for m = 1, 2, 4
    st.table(g1, "(|a1*-..a4*->,|b1+..b4+>) = prod d(a-b)", svh, ket(true, as), ket(false, b), deltas);
    // pairs n > 1: the bra lists its entries reversed, integrals run a1..a4
    st.resolution(g1, "int da1..da4 |a+..><-a*..| = 1", svh, ket(false, a), ket(true, as), bits, 1.0);
    st.resolution(g1, "int da4..da1 |a-..><+a*..| = 1", svh, ket(true, a), ket(false, as), rbits, 1.0);

    const std::string g2 = "gauge four variables";
    st.resolution(g2, "-int da1..da4 |a+..><+a*..| = 1", gau, ket(false, a), ket(false, as), bits, -1.0);
    st.resolution(g2, "-int da1..da4 |a-..><-a*..| = 1", gau, ket(true, a), ket(true, as), bits, -1.0);

    const std::string g3 = "symplectic four variables";
    // bra slot a holds i omega^{a b} a_b^*
    std::vector<Multivector> tw(4, Multivector(alg)), tw2(4, Multivector(alg));
    for (int x = 0; x < 4; ++x)
        for (int y = 0; y < 4; ++y)
            if (alg.omega(x, y)) {
                tw[x] += as[y] * (I * double(alg.omega(x, y)));
                tw2[x] += as[y] * (-I * double(alg.omega(x, y)));
            }
    st.resolution(g3, "int da4..da1 |a-..><(i w a*)+..| = 1", sym, ket(true, a), ket(false, tw), rbits, 1.0);
    st.resolution(g3, "int da4..da1 |a+..><(-i w a*)-..| = 1", sym, ket(false, a), ket(true, tw2), rbits, 1.0);
}

}  // namespace

IdentityReport run_identity_suite(const IdentityOptions& opt) {
    if (opt.n < 1 || opt.n > 2) throw Error("identity suite supports n = 1 or 2");
    Suite st(opt);
    single_generator(st);
    two_generators(st);
    if (opt.n >= 2) four_generators(st);
    return st.report();
}

}  // namespace kvn
