#include <qtmpc/solver/qp_solver.h>

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace qtmpc {

namespace {

using Triplet        = Eigen::Triplet<double>;
constexpr double inf = std::numeric_limits<double>::infinity();

constexpr double kMinScaling = 1e-4;
constexpr double kMaxScaling = 1e4;
constexpr double kRhoMin     = 1e-6;
constexpr double kRhoMax     = 1e6;
constexpr double kRhoEqualityFactor = 1e3;

double inf_norm(const VectorXd& v) { return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>(); }

VectorXd clamp(const VectorXd& v, const VectorXd& lo, const VectorXd& hi) { return v.cwiseMax(lo).cwiseMin(hi); }

SparseMatrix sparse_identity(int n)
{
    SparseMatrix I(n, n);
    I.setIdentity();
    return I;
}

void scale_rows_cols(SparseMatrix& M, const VectorXd& row_scale, const VectorXd& col_scale)
{
    for (int k = 0; k < M.outerSize(); ++k)
    {
        for (SparseMatrix::InnerIterator it(M, k); it; ++it) it.valueRef() *= row_scale[it.row()] * col_scale[it.col()];
    }
}

VectorXd column_inf_norms(const SparseMatrix& M)
{
    VectorXd norms = VectorXd::Zero(M.cols());
    for (int k = 0; k < M.outerSize(); ++k)
    {
        for (SparseMatrix::InnerIterator it(M, k); it; ++it) norms[it.col()] = std::max(norms[it.col()], std::abs(it.value()));
    }
    return norms;
}

VectorXd row_inf_norms(const SparseMatrix& M)
{
    VectorXd norms = VectorXd::Zero(M.rows());
    for (int k = 0; k < M.outerSize(); ++k)
    {
        for (SparseMatrix::InnerIterator it(M, k); it; ++it) norms[it.row()] = std::max(norms[it.row()], std::abs(it.value()));
    }
    return norms;
}

double scaling_factor(double norm)
{
    if (norm < kMinScaling) return 1.0;
    return std::clamp(1.0 / std::sqrt(norm), kMinScaling, kMaxScaling);
}

struct Tolerances
{
    double primal;
    double dual;
};

// Residuals of the unscaled problem and the matching termination thresholds.
struct Residuals
{
    double primal;
    double dual;
    Tolerances tolerance;
};

Residuals compute_residuals(const QpProblem& qp, const VectorXd& x, const VectorXd& z, const VectorXd& y,
                            const QpSettings& settings)
{
    const VectorXd Ax  = qp.A * x;
    const VectorXd Px  = qp.P * x;
    const VectorXd Aty = qp.A.transpose() * y;
    Residuals r;
    r.primal           = inf_norm(Ax - z);
    r.dual             = inf_norm(Px + qp.q + Aty);
    r.tolerance.primal = settings.eps_abs + settings.eps_rel * std::max(inf_norm(Ax), inf_norm(z));
    r.tolerance.dual =
        settings.eps_abs + settings.eps_rel * std::max({inf_norm(Px), inf_norm(Aty), inf_norm(qp.q)});
    return r;
}

bool converged(const Residuals& r) { return r.primal <= r.tolerance.primal && r.dual <= r.tolerance.dual; }

}  // namespace

std::string_view to_string(QpStatus status)
{
    switch (status)
    {
        case QpStatus::solved: return "solved";
        case QpStatus::max_iterations: return "max_iterations";
        case QpStatus::primal_infeasible: return "primal_infeasible";
        case QpStatus::dual_infeasible: return "dual_infeasible";
    }
    return "unknown";
}

QpProblem QpProblem::from_parts(const SparseMatrix& H, const VectorXd& g, const SparseMatrix& A_eq, const VectorXd& b_eq,
                                const SparseMatrix& A_in, const VectorXd& b_in, const VectorXd& lb, const VectorXd& ub)
{
    const int n = static_cast<int>(g.size());
    if (H.rows() != n || H.cols() != n) throw std::invalid_argument("QpProblem: Hessian dimension mismatch");
    if ((A_eq.rows() > 0 && A_eq.cols() != n) || A_eq.rows() != b_eq.size())
        throw std::invalid_argument("QpProblem: equality block dimension mismatch");
    if ((A_in.rows() > 0 && A_in.cols() != n) || A_in.rows() != b_in.size())
        throw std::invalid_argument("QpProblem: inequality block dimension mismatch");
    if (lb.size() != n || ub.size() != n) throw std::invalid_argument("QpProblem: bound dimension mismatch");

    std::vector<int> bounded;
    for (int i = 0; i < n; ++i)
    {
        if (std::isfinite(lb[i]) || std::isfinite(ub[i])) bounded.push_back(i);
    }
    const int m_eq = static_cast<int>(A_eq.rows());
    const int m_in = static_cast<int>(A_in.rows());
    const int m    = m_eq + m_in + static_cast<int>(bounded.size());

    std::vector<Triplet> triplets;
    triplets.reserve(A_eq.nonZeros() + A_in.nonZeros() + bounded.size());
    for (int k = 0; k < A_eq.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(A_eq, k); it; ++it) triplets.emplace_back(it.row(), it.col(), it.value());
    for (int k = 0; k < A_in.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(A_in, k); it; ++it) triplets.emplace_back(m_eq + it.row(), it.col(), it.value());
    for (std::size_t i = 0; i < bounded.size(); ++i) triplets.emplace_back(m_eq + m_in + static_cast<int>(i), bounded[i], 1.0);

    QpProblem qp;
    qp.P = H;
    qp.q = g;
    qp.A.resize(m, n);
    qp.A.setFromTriplets(triplets.begin(), triplets.end());
    qp.lower.resize(m);
    qp.upper.resize(m);
    qp.lower.head(m_eq) = b_eq;
    qp.upper.head(m_eq) = b_eq;
    qp.lower.segment(m_eq, m_in).setConstant(-inf);
    qp.upper.segment(m_eq, m_in) = b_in;
    for (std::size_t i = 0; i < bounded.size(); ++i)
    {
        qp.lower[m_eq + m_in + i] = lb[bounded[i]];
        qp.upper[m_eq + m_in + i] = ub[bounded[i]];
    }
    return qp;
}

struct QpSolver::Scaled
{
    SparseMatrix P;
    VectorXd q;
    SparseMatrix A;
    VectorXd lower;
    VectorXd upper;
    VectorXd D;  // variable scaling
    VectorXd E;  // constraint scaling
    double c = 1.0;
};

void QpSolver::factorize(const SparseMatrix& K)
{
    const int* outer = K.outerIndexPtr();
    const int* inner = K.innerIndexPtr();
    const bool same_pattern =
        _symbolic_count > 0 && static_cast<int>(_pattern_outer.size()) == K.outerSize() + 1 &&
        static_cast<int>(_pattern_inner.size()) == K.nonZeros() &&
        std::equal(_pattern_outer.begin(), _pattern_outer.end(), outer) &&
        std::equal(_pattern_inner.begin(), _pattern_inner.end(), inner);
    if (!same_pattern)
    {
        _ldlt.analyzePattern(K);
        _pattern_outer.assign(outer, outer + K.outerSize() + 1);
        _pattern_inner.assign(inner, inner + K.nonZeros());
        ++_symbolic_count;
    }
    _ldlt.factorize(K);
    if (_ldlt.info() != Eigen::Success) throw std::runtime_error("QpSolver: KKT factorization failed");
}

QpResult QpSolver::solve(const QpProblem& problem, const VectorXd* x_warm, const VectorXd* y_warm)
{
    const int n = problem.variables();
    const int m = problem.constraints();
    if (problem.P.rows() != n || problem.P.cols() != n || problem.A.rows() != m || (m > 0 && problem.A.cols() != n) ||
        problem.upper.size() != m)
        throw std::invalid_argument("QpSolver::solve: inconsistent problem dimensions");
    if ((problem.lower.array() > problem.upper.array()).any())
    {
        // Trivially infeasible row bounds.
        QpResult result;
        result.x      = VectorXd::Zero(n);
        result.y      = VectorXd::Zero(m);
        result.status = QpStatus::primal_infeasible;
        return result;
    }

    SparseMatrix A = problem.A;
    if (A.cols() != n) A.resize(m, n);
    QpProblem qp = problem;
    qp.A         = A;

    // Ruiz equilibration of [P A'; A 0] plus cost scaling.
    Scaled s;
    s.P = qp.P;
    s.q = qp.q;
    s.A = qp.A;
    s.D = VectorXd::Ones(n);
    s.E = VectorXd::Ones(m);
    for (int it = 0; it < _settings.scaling_iterations; ++it)
    {
        const VectorXd colP = column_inf_norms(s.P);
        const VectorXd colA = column_inf_norms(s.A);
        const VectorXd rowA = row_inf_norms(s.A);
        VectorXd dD(n), dE(m);
        for (int j = 0; j < n; ++j) dD[j] = scaling_factor(std::max(colP[j], colA[j]));
        for (int i = 0; i < m; ++i) dE[i] = scaling_factor(rowA[i]);
        scale_rows_cols(s.P, dD, dD);
        scale_rows_cols(s.A, dE, dD);
        s.q = s.q.cwiseProduct(dD);
        s.D = s.D.cwiseProduct(dD);
        s.E = s.E.cwiseProduct(dE);
    }
    {
        const VectorXd colP = column_inf_norms(s.P);
        const double mean   = n > 0 ? colP.mean() : 0.0;
        double cost         = std::max(mean, inf_norm(s.q));
        s.c                 = cost < kMinScaling ? 1.0 : std::clamp(1.0 / cost, kMinScaling, kMaxScaling);
        s.P *= s.c;
        s.q *= s.c;
    }
    s.lower = qp.lower.cwiseProduct(s.E);
    s.upper = qp.upper.cwiseProduct(s.E);

    // Per-row step sizes: stiff for equalities, loose for free rows.
    double rho = _settings.rho;
    auto make_rho_vector = [&](double base) {
        VectorXd r(m);
        for (int i = 0; i < m; ++i)
        {
            if (!std::isfinite(qp.lower[i]) && !std::isfinite(qp.upper[i]))
                r[i] = kRhoMin;
            else if (qp.lower[i] == qp.upper[i])
                r[i] = kRhoEqualityFactor * base;
            else
                r[i] = base;
        }
        return r;
    };
    VectorXd rho_vec = make_rho_vector(rho);

    const SparseMatrix At = s.A.transpose();
    const SparseMatrix I  = sparse_identity(n);
    auto assemble         = [&](const VectorXd& rv) {
        SparseMatrix RA = rv.asDiagonal() * s.A;
        SparseMatrix K  = s.P + _settings.sigma * I;
        if (m > 0) K += SparseMatrix(At * RA);
        K.makeCompressed();
        return K;
    };
    factorize(assemble(rho_vec));

    // Iterates in scaled space.
    VectorXd x = VectorXd::Zero(n), z = VectorXd::Zero(m), y = VectorXd::Zero(m);
    if (x_warm && x_warm->size() == n) x = x_warm->cwiseQuotient(s.D);
    if (y_warm && y_warm->size() == m) y = y_warm->cwiseQuotient(s.E) * s.c;
    z = clamp(s.A * x, s.lower, s.upper);

    QpResult result;
    result.status = QpStatus::max_iterations;

    auto unscaled = [&](const VectorXd& xs, const VectorXd& zs, const VectorXd& ys, VectorXd& xu, VectorXd& zu,
                        VectorXd& yu) {
        xu = xs.cwiseProduct(s.D);
        zu = zs.cwiseQuotient(s.E);
        yu = ys.cwiseProduct(s.E) / s.c;
    };

    const double alpha = _settings.alpha;
    const double sigma = _settings.sigma;
    VectorXd x_prev, y_prev, xt(n), zt(m), rhs(n);
    int iter        = 0;
    int next_polish = 2 * _settings.check_interval;
    double window_value = std::numeric_limits<double>::infinity();
    int window_iter     = 0;
    for (iter = 1; iter <= _settings.max_iterations; ++iter)
    {
        x_prev = x;
        y_prev = y;

        rhs = sigma * x - s.q;
        if (m > 0) rhs += At * (rho_vec.cwiseProduct(z) - y);
        xt = _ldlt.solve(rhs);
        zt = s.A * xt;

        x                     = alpha * xt + (1.0 - alpha) * x_prev;
        const VectorXd z_relax = alpha * zt + (1.0 - alpha) * z;
        const VectorXd z_new  = clamp(z_relax + y.cwiseQuotient(rho_vec), s.lower, s.upper);
        y += rho_vec.cwiseProduct(z_relax - z_new);
        z = z_new;

        if (iter % _settings.check_interval != 0 && iter != _settings.max_iterations) continue;

        VectorXd xu, zu, yu;
        unscaled(x, z, y, xu, zu, yu);
        const Residuals res = compute_residuals(qp, xu, zu, yu, _settings);
        result.x               = xu;
        result.y               = yu;
        result.primal_residual = res.primal;
        result.dual_residual   = res.dual;
        result.iterations      = iter;

        if (converged(res))
        {
            result.status = QpStatus::solved;
            break;
        }
        const double progress = std::max(res.primal / res.tolerance.primal, res.dual / res.tolerance.dual);
        if (progress <= 0.5 * window_value)
        {
            window_value = progress;
            window_iter  = iter;
        }
        else if (_settings.stall_iterations > 0 && iter - window_iter >= _settings.stall_iterations)
        {
            break;
        }

        // Polish early once the iterates are roughly right; exits as soon as
        // the active set has been identified.
        if (_settings.polish && iter >= next_polish && res.primal <= 1e4 * res.tolerance.primal &&
            res.dual <= 1e4 * res.tolerance.dual)
        {
            QpResult trial = result;
            if (polish(qp, trial))
            {
                trial.status = QpStatus::solved;
                return trial;
            }
            next_polish = 2 * iter;
        }

        // Infeasibility certificates (unscaled differences).
        const VectorXd dy = (y - y_prev).cwiseProduct(s.E);
        const double dy_norm = inf_norm(dy);
        if (m > 0 && dy_norm > 1e-30)
        {
            const double aty = inf_norm(qp.A.transpose() * dy);
            double support   = 0.0;
            bool finite      = true;
            for (int i = 0; i < m && finite; ++i)
            {
                if (dy[i] > 0.0)
                {
                    if (!std::isfinite(qp.upper[i])) finite = false;
                    else support += qp.upper[i] * dy[i];
                }
                else if (dy[i] < 0.0)
                {
                    if (!std::isfinite(qp.lower[i])) finite = false;
                    else support += qp.lower[i] * dy[i];
                }
            }
            const double eps = _settings.eps_primal_infeasible;
            if (finite && aty <= eps * dy_norm && support < -eps * dy_norm)
            {
                result.status               = QpStatus::primal_infeasible;
                result.certificate          = dy / dy_norm;
                result.certificate_residual = aty / dy_norm;
                return result;
            }
        }
        const VectorXd dx  = (x - x_prev).cwiseProduct(s.D);
        const double dx_norm = inf_norm(dx);
        if (dx_norm > 1e-30)
        {
            const double eps  = _settings.eps_dual_infeasible;
            bool certificate  = inf_norm(qp.P * dx) <= eps * dx_norm && qp.q.dot(dx) < -eps * dx_norm;
            const VectorXd Adx = qp.A * dx;
            for (int i = 0; i < m && certificate; ++i)
            {
                const double v = Adx[i];
                if (std::isfinite(qp.upper[i]) && v > eps * dx_norm) certificate = false;
                if (std::isfinite(qp.lower[i]) && v < -eps * dx_norm) certificate = false;
            }
            if (certificate)
            {
                result.status      = QpStatus::dual_infeasible;
                result.certificate = dx / dx_norm;
                return result;
            }
        }

        if (_settings.adaptive_rho && m > 0)
        {
            const VectorXd Ax  = s.A * x;
            const double prim  = inf_norm(Ax - z) / std::max({inf_norm(Ax), inf_norm(z), 1e-30});
            const VectorXd Px  = s.P * x;
            const VectorXd Aty = At * y;
            const double dual  = inf_norm(Px + s.q + Aty) / std::max({inf_norm(Px), inf_norm(Aty), inf_norm(s.q), 1e-30});
            double rho_new     = rho * std::sqrt(prim / std::max(dual, 1e-30));
            rho_new            = std::clamp(rho_new, kRhoMin, kRhoMax);
            if (rho_new > 5.0 * rho || rho_new < 0.2 * rho)
            {
                rho     = rho_new;
                rho_vec = make_rho_vector(rho);
                factorize(assemble(rho_vec));
            }
        }
    }

    if (result.status == QpStatus::solved && _settings.polish)
    {
        QpResult trial = result;
        if (polish(qp, trial)) return trial;
    }
    if (result.status == QpStatus::max_iterations && _settings.polish)
    {
        QpResult trial = result;
        if (polish(qp, trial))
        {
            trial.status = QpStatus::solved;
            return trial;
        }
    }
    if (result.status == QpStatus::max_iterations && _settings.interior_point_fallback)
    {
        QpResult trial = result;
        if (interior_point(qp, trial))
        {
            trial.iterations += result.iterations;
            return trial;
        }
    }
    return result;
}

bool QpSolver::interior_point(const QpProblem& qp, QpResult& result) const
{
    const int n = qp.variables();
    const int m = qp.constraints();

    // Equalities C x = d and one-sided rows G x >= h (upper bounds negated).
    std::vector<int> eq_rows, lo_rows, up_rows;
    for (int i = 0; i < m; ++i)
    {
        if (qp.lower[i] == qp.upper[i])
        {
            eq_rows.push_back(i);
            continue;
        }
        if (std::isfinite(qp.lower[i])) lo_rows.push_back(i);
        if (std::isfinite(qp.upper[i])) up_rows.push_back(i);
    }
    const int me = static_cast<int>(eq_rows.size());
    const int mi = static_cast<int>(lo_rows.size() + up_rows.size());

    std::vector<int> row_pos(m, -1), row_sign(m, 0);
    const SparseMatrix At = qp.A.transpose();  // column i = row i of A
    std::vector<Triplet> tc, tg;
    VectorXd d(me), h(mi);
    for (int r = 0; r < me; ++r)
    {
        for (SparseMatrix::InnerIterator it(At, eq_rows[r]); it; ++it) tc.emplace_back(r, it.row(), it.value());
        d[r] = qp.lower[eq_rows[r]];
    }
    int r = 0;
    for (int i : lo_rows)
    {
        for (SparseMatrix::InnerIterator it(At, i); it; ++it) tg.emplace_back(r, it.row(), it.value());
        h[r++] = qp.lower[i];
    }
    for (int i : up_rows)
    {
        for (SparseMatrix::InnerIterator it(At, i); it; ++it) tg.emplace_back(r, it.row(), -it.value());
        h[r++] = -qp.upper[i];
    }
    SparseMatrix C(me, n), G(mi, n);
    C.setFromTriplets(tc.begin(), tc.end());
    G.setFromTriplets(tg.begin(), tg.end());
    const SparseMatrix Ct = C.transpose(), Gt = G.transpose();

    VectorXd x = VectorXd::Zero(n), lam = VectorXd::Zero(me);
    VectorXd s = (G * x - h).cwiseMax(1.0), z = VectorXd::Ones(mi);

    const double eps   = std::max(_settings.eps_abs, 1e-10);
    const double scale = 1.0 + std::max(inf_norm(qp.q), std::max(inf_norm(d), inf_norm(h.cwiseAbs().cwiseMin(1e20))));
    constexpr double delta = 1e-10;

    Eigen::SparseLU<SparseMatrix> lu;
    bool analyzed = false;
    for (int it = 0; it < _settings.interior_point_max_iterations; ++it)
    {
        const VectorXd r_d = qp.P * x + qp.q - Ct * lam - Gt * z;
        const VectorXd r_e = C * x - d;
        const VectorXd r_i = G * x - s - h;
        const double mu    = mi > 0 ? s.dot(z) / mi : 0.0;
        if (inf_norm(r_d) <= eps * scale && inf_norm(r_e) <= eps * scale && inf_norm(r_i) <= eps * scale &&
            mu <= eps * 1e-1)
        {
            VectorXd y = VectorXd::Zero(m);
            for (int k = 0; k < me; ++k) y[eq_rows[k]] = -lam[k];
            int k = 0;
            for (int i : lo_rows) y[i] -= z[k++];
            for (int i : up_rows) y[i] += z[k++];
            const VectorXd zc   = clamp(qp.A * x, qp.lower, qp.upper);
            const Residuals res = compute_residuals(qp, x, zc, y, _settings);
            result.x               = x;
            result.y               = y;
            result.status          = QpStatus::solved;
            result.iterations      = it;
            result.primal_residual = res.primal;
            result.dual_residual   = res.dual;
            result.interior_point  = true;
            return true;
        }

        // Reduced Newton matrix [P + G'WG, C'; C, 0] with W = Z / S.
        const VectorXd w = z.cwiseQuotient(s);
        SparseMatrix H   = qp.P + SparseMatrix(Gt * w.asDiagonal() * G);
        std::vector<Triplet> tk;
        tk.reserve(H.nonZeros() + 2 * C.nonZeros() + n + me);
        for (int k = 0; k < H.outerSize(); ++k)
            for (SparseMatrix::InnerIterator e(H, k); e; ++e) tk.emplace_back(e.row(), e.col(), e.value());
        for (int k = 0; k < C.outerSize(); ++k)
            for (SparseMatrix::InnerIterator e(C, k); e; ++e)
            {
                tk.emplace_back(n + e.row(), e.col(), e.value());
                tk.emplace_back(e.col(), n + e.row(), e.value());
            }
        for (int k = 0; k < n; ++k) tk.emplace_back(k, k, delta);
        for (int k = 0; k < me; ++k) tk.emplace_back(n + k, n + k, -delta);
        SparseMatrix K(n + me, n + me);
        K.setFromTriplets(tk.begin(), tk.end());
        K.makeCompressed();
        if (!analyzed)
        {
            lu.analyzePattern(K);
            analyzed = true;
        }
        lu.factorize(K);
        if (lu.info() != Eigen::Success) return false;

        auto newton = [&](const VectorXd& r_c, VectorXd& dx, VectorXd& dlam, VectorXd& ds, VectorXd& dz) {
            VectorXd rhs(n + me);
            rhs.head(n) = -r_d - Gt * (w.cwiseProduct(r_i) + r_c.cwiseQuotient(s));
            rhs.tail(me) = -r_e;
            VectorXd sol = lu.solve(rhs);
            for (int k = 0; k < 2; ++k)
            {
                const VectorXd res = rhs - K * sol;
                sol += lu.solve(res);
            }
            dx   = sol.head(n);
            dlam = -sol.tail(me);
            dz   = -w.cwiseProduct(G * dx + r_i) - r_c.cwiseQuotient(s);
            ds   = -(r_c + s.cwiseProduct(dz)).cwiseQuotient(z);
        };
        auto max_step = [](const VectorXd& v, const VectorXd& dv) {
            double a = 1.0;
            for (int k = 0; k < v.size(); ++k)
                if (dv[k] < 0.0) a = std::min(a, -v[k] / dv[k]);
            return a;
        };

        VectorXd dx, dlam, ds, dz;
        newton(s.cwiseProduct(z), dx, dlam, ds, dz);
        const double a_aff = std::min(max_step(s, ds), max_step(z, dz));
        double sigma       = 0.0;
        if (mi > 0)
        {
            const double mu_aff = (s + a_aff * ds).dot(z + a_aff * dz) / mi;
            sigma               = std::pow(mu_aff / std::max(mu, 1e-300), 3);
        }
        const VectorXd r_c = s.cwiseProduct(z) + ds.cwiseProduct(dz) - VectorXd::Constant(mi, sigma * mu);
        newton(r_c, dx, dlam, ds, dz);
        const double alpha = std::min(1.0, 0.99 * std::min(max_step(s, ds), max_step(z, dz)));
        x += alpha * dx;
        lam += alpha * dlam;
        s += alpha * ds;
        z += alpha * dz;
        if (!x.allFinite() || !s.allFinite() || !z.allFinite()) return false;
    }
    return false;
}

bool QpSolver::polish(const QpProblem& qp, QpResult& result) const
{
    const int n = qp.variables();
    const int m = qp.constraints();
    const VectorXd z = qp.A * result.x;

    // Guess the active set from the ADMM multipliers.
    enum class Active { none, lower, upper, equality };
    std::vector<Active> active(m, Active::none);
    std::vector<int> rows;
    for (int i = 0; i < m; ++i)
    {
        const double l = qp.lower[i], u = qp.upper[i], yi = result.y[i];
        if (l == u)
            active[i] = Active::equality;
        else if (std::isfinite(l) && z[i] - l < -yi)
            active[i] = Active::lower;
        else if (std::isfinite(u) && u - z[i] < yi)
            active[i] = Active::upper;
        if (active[i] != Active::none) rows.push_back(i);
    }
    const int ma = static_cast<int>(rows.size());

    constexpr double delta = 1e-9;
    std::vector<Triplet> reg, exact;
    for (int k = 0; k < qp.P.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(qp.P, k); it; ++it)
        {
            reg.emplace_back(it.row(), it.col(), it.value());
            exact.emplace_back(it.row(), it.col(), it.value());
        }
    for (int i = 0; i < n; ++i) reg.emplace_back(i, i, delta);
    VectorXd b(n + ma);
    b.head(n) = -qp.q;
    {
        std::vector<int> position(m, -1);
        for (int r = 0; r < ma; ++r) position[rows[r]] = r;
        for (int k = 0; k < qp.A.outerSize(); ++k)
            for (SparseMatrix::InnerIterator it(qp.A, k); it; ++it)
            {
                const int r = position[it.row()];
                if (r < 0) continue;
                for (auto* t : {&reg, &exact})
                {
                    t->emplace_back(n + r, it.col(), it.value());
                    t->emplace_back(it.col(), n + r, it.value());
                }
            }
        for (int r = 0; r < ma; ++r)
        {
            const int i = rows[r];
            reg.emplace_back(n + r, n + r, -delta);
            b[n + r] = active[i] == Active::upper ? qp.upper[i] : qp.lower[i];
        }
    }
    SparseMatrix K_reg(n + ma, n + ma), K(n + ma, n + ma);
    K_reg.setFromTriplets(reg.begin(), reg.end());
    K.setFromTriplets(exact.begin(), exact.end());

    Eigen::SparseLU<SparseMatrix> lu;
    lu.compute(K_reg);
    if (lu.info() != Eigen::Success) return false;
    VectorXd sol = lu.solve(b);
    for (int it = 0; it < 5; ++it)
    {
        const VectorXd r = b - K * sol;
        if (inf_norm(r) < 1e-14 * std::max(1.0, inf_norm(b))) break;
        sol += lu.solve(r);
    }
    if (!sol.allFinite()) return false;

    VectorXd x = sol.head(n);
    VectorXd y = VectorXd::Zero(m);
    for (int r = 0; r < ma; ++r)
    {
        const int i = rows[r];
        double yi   = sol[n + r];
        if (active[i] == Active::lower) yi = std::min(yi, 0.0);
        if (active[i] == Active::upper) yi = std::max(yi, 0.0);
        y[i] = yi;
    }
    const VectorXd zp  = clamp(qp.A * x, qp.lower, qp.upper);
    const Residuals res = compute_residuals(qp, x, zp, y, _settings);
    const bool improves = res.primal <= std::max(result.primal_residual, res.tolerance.primal) &&
                          res.dual <= std::max(result.dual_residual, res.tolerance.dual);
    if (!converged(res) || !improves) return false;

    result.x               = std::move(x);
    result.y               = std::move(y);
    result.primal_residual = res.primal;
    result.dual_residual   = res.dual;
    result.polished        = true;
    return true;
}

QpResult solve_qp(const QpProblem& problem, const QpSettings& settings)
{
    QpSolver solver(settings);
    return solver.solve(problem);
}

}  // namespace qtmpc
