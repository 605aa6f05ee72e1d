//! Exact evaluation of the bracket identities behind the controllability proof.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::algebra::{
    format_rational, nested_commutator, rational, Coeff, Exact, Pauli, PauliString,
    StructuredOperator, SystemBasisOp, Unit,
};
use crate::error::Result;
use crate::model::{drift_parts, ControlModel};

use super::dense::{membership, ClosureResult};
use super::exact::exact_rank;

/// Relative residual below which a floating membership test passes.
pub const MEMBERSHIP_TOL: f64 = 1e-8;

/// Largest accessor length for checks that enumerate every Pauli string.
const MAX_ENUMERATED_M: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub id: String,
    pub status: CheckStatus,
    /// Largest coefficient magnitude of `lhs − rhs`, or a membership residual.
    pub max_deviation: Option<f64>,
    pub detail: String,
}

impl IdentityCheck {
    fn skipped(id: &str, reason: impl Into<String>) -> Self {
        IdentityCheck {
            id: id.to_string(),
            status: CheckStatus::Skipped,
            max_deviation: None,
            detail: reason.into(),
        }
    }

    fn from_deviation(id: &str, deviation: f64, detail: impl Into<String>) -> Self {
        IdentityCheck {
            id: id.to_string(),
            status: if deviation == 0.0 { CheckStatus::Pass } else { CheckStatus::Fail },
            max_deviation: Some(deviation),
            detail: detail.into(),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == CheckStatus::Pass
    }
}

type Op = StructuredOperator<Exact>;

fn q(num: i64, den: i64) -> Exact {
    Exact::from_rational(&rational(num, den))
}

fn i_times(c: Exact) -> Exact {
    c * Exact::imag_unit()
}

fn max_abs(op: &Op) -> f64 {
    op.terms()
        .map(|(_, _, c)| c.to_c64().norm())
        .fold(0.0, f64::max)
}

fn deviation(lhs: &Op, rhs: &Op) -> f64 {
    max_abs(&(lhs - rhs))
}

struct Ctx<'a> {
    model: &'a ControlModel,
    n: usize,
    m: usize,
}

impl Ctx<'_> {
    fn ps(&self, labels: &[(usize, Pauli)]) -> PauliString {
        let mut p = PauliString::identity(self.m);
        for &(site, l) in labels {
            p.set(site, l);
        }
        p
    }

    /// `c · 1_S ⊗ σ_[p]`
    fn acc(&self, p: PauliString, c: Exact) -> Op {
        StructuredOperator::accessor(self.n, self.m, p, c).expect("length matches")
    }

    /// `i · 1_S ⊗ σ_[p]`
    fn iacc(&self, p: PauliString) -> Op {
        self.acc(p, Exact::imag_unit())
    }

    fn sys(&self, op: SystemBasisOp, p: PauliString, c: Exact) -> Op {
        StructuredOperator::term(self.n, self.m, op, p, c).expect("indices in range")
    }

    fn all_z(&self) -> PauliString {
        PauliString::new(&vec![Pauli::Z; self.m])
    }

    /// `i(1_S ⊗ H_A′)`
    fn i_chain(&self) -> Op {
        drift_parts::<Exact>(self.model).accessor_chain.scale(&Exact::imag_unit())
    }

    /// `iH_0′ = i(H_0 − 1_S ⊗ H_A^0)`
    fn i_drift_prime(&self) -> Op {
        let p = drift_parts::<Exact>(self.model);
        (&(&(&p.system + &p.excitation) + &p.accessor_chain) + &p.coupling).scale(&Exact::imag_unit())
    }

    /// `[1⊗σ_{β_M}, [… [1⊗σ_{β_1}, target] …]]` times `i^M`.
    fn beta_bracket(&self, beta: &PauliString, target: &Op) -> Result<Op> {
        let seq: Vec<Op> = (1..=self.m)
            .map(|j| self.acc(PauliString::single(self.m, j, beta.get(j)), Exact::one()))
            .collect();
        let mut factor = Exact::one();
        for _ in 0..self.m {
            factor = i_times(factor);
        }
        Ok(nested_commutator(&seq, target)?.scale(&factor))
    }
}

fn lemma1(cx: &Ctx) -> Result<IdentityCheck> {
    const ID: &str = "lemma1";
    if cx.m < 2 {
        return Ok(IdentityCheck::skipped(ID, "needs M >= 2"));
    }
    if cx.m > MAX_ENUMERATED_M + 2 {
        return Ok(IdentityCheck::skipped(ID, format!("M > {} not enumerated", MAX_ENUMERATED_M + 2)));
    }
    let target = cx.i_chain();
    let c1 = Exact::from_rational(&cx.model.chain()[0]);
    let zz = cx.ps(&[(1, Pauli::Z), (2, Pauli::Z)]);
    let mut worst = 0.0f64;
    let mut nonzero = Vec::new();
    for beta in PauliString::all_xy(cx.m) {
        let lhs = cx.beta_bracket(&beta, &target)?;
        let yy = cx.m == 2 && beta.get(1) == Pauli::Y && beta.get(2) == Pauli::Y;
        let rhs = if yy {
            cx.acc(zz, i_times(q(4, 1) * c1.clone()))
        } else {
            StructuredOperator::zero(cx.n, cx.m)
        };
        worst = worst.max(deviation(&lhs, &rhs));
        if !lhs.is_zero() {
            nonzero.push(format!("beta={beta}: {lhs}"));
        }
    }
    let detail = if nonzero.is_empty() {
        format!("all {} brackets vanish", 1usize << cx.m)
    } else {
        nonzero.join("; ")
    };
    Ok(IdentityCheck::from_deviation(ID, worst, detail))
}

fn lemma2_sig3(cx: &Ctx) -> Result<IdentityCheck> {
    let mut worst = 0.0f64;
    let half = q(-1, 2);
    for j in 1..=cx.m {
        let ix = cx.iacc(PauliString::single(cx.m, j, Pauli::X));
        let iy = cx.iacc(PauliString::single(cx.m, j, Pauli::Y));
        let lhs = ix.commutator(&iy)?.scale(&half);
        worst = worst.max(deviation(&lhs, &cx.iacc(PauliString::single(cx.m, j, Pauli::Z))));
    }
    Ok(IdentityCheck::from_deviation(
        "lemma2.sig3",
        worst,
        format!("-1/2 [iH_x^j, iH_y^j] = i(1 x sigma_z^j) for j = 1..{}", cx.m),
    ))
}

fn lemma2_chain(cx: &Ctx) -> Result<IdentityCheck> {
    const ID: &str = "lemma2.chain";
    if cx.m < 3 {
        return Ok(IdentityCheck::skipped(ID, "needs M >= 3"));
    }
    use Pauli::{X, Y, Z};
    let half = q(1, 2);
    let mhalf = q(-1, 2);
    let mut worst = 0.0f64;
    let mut steps = 0;
    // X_1…X_k from X_1…X_{k−1} and the chain element X_{k−1}X_k, for every k.
    let mut prefix = cx.iacc(cx.ps(&[(1, X), (2, X)]));
    for k in 2..cx.m {
        // ½[iX_kX_{k+1}, iZ_k] = iY_kX_{k+1}
        let a = cx.iacc(cx.ps(&[(k, X), (k + 1, X)])).commutator(&cx.iacc(cx.ps(&[(k, Z)])))?.scale(&half);
        let ya = cx.iacc(cx.ps(&[(k, Y), (k + 1, X)]));
        worst = worst.max(deviation(&a, &ya));
        // −½[iX_1…X_k, iY_kX_{k+1}] = iX_1…X_{k−1}Z_kX_{k+1}
        let b = prefix.commutator(&ya)?.scale(&mhalf);
        let mut zl: Vec<(usize, Pauli)> = (1..k).map(|s| (s, X)).collect();
        zl.extend([(k, Z), (k + 1, X)]);
        let zb = cx.iacc(cx.ps(&zl));
        worst = worst.max(deviation(&b, &zb));
        // ½[iX_1…Z_kX_{k+1}, iY_k] = iX_1…X_{k+1}
        let c = zb.commutator(&cx.iacc(cx.ps(&[(k, Y)])))?.scale(&half);
        let xl: Vec<(usize, Pauli)> = (1..=k + 1).map(|s| (s, X)).collect();
        prefix = cx.iacc(cx.ps(&xl));
        worst = worst.max(deviation(&c, &prefix));
        steps += 3;
    }
    Ok(IdentityCheck::from_deviation(
        ID,
        worst,
        format!("{steps} bracket steps ending in i(1 x sigma_x^1...sigma_x^{})", cx.m),
    ))
}

fn lemma2_drop_site(cx: &Ctx) -> Result<IdentityCheck> {
    const ID: &str = "lemma2.drop-site";
    if cx.m < 2 {
        return Ok(IdentityCheck::skipped(ID, "needs M >= 2"));
    }
    use Pauli::{X, Y, Z};
    let xy = cx.ps(&[(1, X), (2, Y)]);
    let a = cx
        .iacc(cx.ps(&[(1, X), (2, X)]))
        .commutator(&cx.iacc(cx.ps(&[(2, Z)])))?
        .scale(&q(1, 2));
    let mut worst = deviation(&a, &cx.iacc(xy));
    let all_x = PauliString::new(&vec![X; cx.m]);
    let b = cx.iacc(all_x).commutator(&cx.iacc(xy))?.scale(&q(-1, 2));
    let mut expect = all_x;
    expect.set(1, Pauli::I);
    expect.set(2, Z);
    worst = worst.max(deviation(&b, &cx.iacc(expect)));
    Ok(IdentityCheck::from_deviation(ID, worst, format!("result i(1 x {expect})")))
}

/// The `s_j^(k) ⊗ σ_z^1⋯σ_z^M` element predicted for `β`,
/// `i(−1)^{M+Δ} 2^M Σ g_[β̄] s_j^(k)`.
fn predicted_bracket(cx: &Ctx, beta: &PauliString) -> Op {
    let bar = beta.complement();
    let sign = if (cx.m + beta.count_y()).is_multiple_of(2) { 1 } else { -1 };
    let scale = i_times(q(sign * (1i64 << cx.m), 1));
    let mut out = StructuredOperator::zero(cx.n, cx.m);
    for cp in cx.model.couplings().iter().filter(|cp| cp.alpha == bar) {
        let c = scale.clone() * Exact::from_rational(&cp.g);
        out = &out + &cx.sys(SystemBasisOp::s(cp.j, cp.k), cx.all_z(), c);
    }
    out
}

fn lemma3_structure(cx: &Ctx) -> Result<IdentityCheck> {
    const ID: &str = "lemma3.bracket-structure";
    if cx.m <= 2 {
        return Ok(IdentityCheck::skipped(ID, "needs M > 2"));
    }
    if cx.m > MAX_ENUMERATED_M + 2 {
        return Ok(IdentityCheck::skipped(ID, "accessor too long to enumerate"));
    }
    let target = cx.i_drift_prime();
    let z = cx.all_z();
    let mut stray = StructuredOperator::zero(cx.n, cx.m);
    let mut supported = 0;
    for beta in PauliString::all_xy(cx.m) {
        let lhs = cx.beta_bracket(&beta, &target)?;
        for (u, p, c) in lhs.terms() {
            let adjacent = (u.row as i32 - u.col as i32).abs() == 1;
            if p == z && adjacent {
                supported += 1;
            } else {
                stray = &stray + &StructuredOperator::from_raw_terms(cx.n, cx.m, [(u, p, c.clone())])?;
            }
        }
    }
    Ok(IdentityCheck::from_deviation(
        ID,
        max_abs(&stray),
        format!(
            "{supported} terms on s_j^(k) x sigma_z^1...sigma_z^M, {} elsewhere",
            stray.num_terms()
        ),
    ))
}

fn lemma3_coefficients(cx: &Ctx) -> Result<IdentityCheck> {
    const ID: &str = "lemma3.bracket-coefficients";
    if cx.m > MAX_ENUMERATED_M + 2 {
        return Ok(IdentityCheck::skipped(ID, "accessor too long to enumerate"));
    }
    let target = drift_parts::<Exact>(cx.model).coupling.scale(&Exact::imag_unit());
    let mut worst = 0.0f64;
    let mut nonzero = 0;
    for beta in PauliString::all_xy(cx.m) {
        let lhs = cx.beta_bracket(&beta, &target)?;
        nonzero += usize::from(!lhs.is_zero());
        worst = worst.max(deviation(&lhs, &predicted_bracket(cx, &beta)));
    }
    Ok(IdentityCheck::from_deviation(
        ID,
        worst,
        format!("{nonzero} of {} brackets of iH_SA nonzero", 1usize << cx.m),
    ))
}

fn nonidentity_strings(m: usize) -> Vec<PauliString> {
    PauliString::all(m).into_iter().filter(|p| !p.is_identity()).collect()
}

fn lemma3_closing(cx: &Ctx) -> Result<IdentityCheck> {
    const ID: &str = "lemma3.closing";
    if cx.m > MAX_ENUMERATED_M {
        return Ok(IdentityCheck::skipped(ID, "accessor too long to enumerate"));
    }
    let mut worst = 0.0f64;
    let i = Exact::imag_unit();
    let id = PauliString::identity(cx.m);
    for j in 1..cx.n {
        let rhs = cx.sys(SystemBasisOp::H(j), id, -i.clone());
        for a in nonidentity_strings(cx.m) {
            let x = cx.sys(SystemBasisOp::x(j), a, i.clone());
            let y = cx.sys(SystemBasisOp::y(j), a, i.clone());
            let lhs = x.commutator(&y)?.scale(&q(-1, 2));
            worst = worst.max(deviation(&lhs, &rhs));
        }
    }
    Ok(IdentityCheck::from_deviation(
        ID,
        worst,
        "(-2)^-1 [ix_j x sigma_[a], iy_j x sigma_[a]] = -ih_j x 1_A with y_j = i(e_j,j+1 - e_j+1,j); \
         the opposite sign is obtained only with y_j = -i(e_j,j+1 - e_j+1,j)",
    ))
}

fn lemma4_sigmaxxx(cx: &Ctx) -> Result<IdentityCheck> {
    const ID: &str = "lemma4.sigmaxxx";
    if cx.m < 2 {
        return Ok(IdentityCheck::skipped(ID, "needs M >= 2"));
    }
    let parts = drift_parts::<Exact>(cx.model);
    let i = Exact::imag_unit();
    // iH_0″ = i(1_S ⊗ H_A′) + iH_S′
    let mut h = (&parts.accessor_chain + &parts.excitation).scale(&i);
    let mut worst = 0.0f64;
    for j in 1..cx.m {
        let iy = cx.iacc(PauliString::single(cx.m, j, Pauli::Y));
        let lhs = h.commutator(&iy)?.commutator(&iy)?;
        let xx = PauliString::pair(cx.m, j, Pauli::X, Pauli::X);
        let cj = Exact::from_rational(&cx.model.chain()[j - 1]);
        let rhs = cx.acc(xx, i_times(q(-4, 1) * cj.clone()));
        worst = worst.max(deviation(&lhs, &rhs));
        h = &h - &cx.acc(xx, i_times(cj));
    }
    Ok(IdentityCheck::from_deviation(
        ID,
        worst,
        format!("[[iH_0'' - ..., iH_y^j], iH_y^j] = -4ic_j (1 x sigma_x^j sigma_x^j+1) for j = 1..{}", cx.m - 1),
    ))
}

fn lemma4_membership(cx: &Ctx, closure: Option<&ClosureResult>) -> Result<IdentityCheck> {
    const ID: &str = "lemma4.chain-membership";
    if cx.m < 2 {
        return Ok(IdentityCheck::skipped(ID, "needs M >= 2"));
    }
    let Some(closure) = closure else {
        return Ok(IdentityCheck::skipped(ID, "no closure supplied"));
    };
    let mut worst = 0.0f64;
    let mut members = 0;
    for j in 1..cx.m {
        let el = cx.iacc(PauliString::pair(cx.m, j, Pauli::X, Pauli::X)).to_floating();
        let r = membership(&el, closure, MEMBERSHIP_TOL)?;
        members += usize::from(r.member);
        worst = worst.max(r.residual);
    }
    Ok(IdentityCheck {
        id: ID.to_string(),
        status: if members == cx.m - 1 { CheckStatus::Pass } else { CheckStatus::Fail },
        max_deviation: Some(worst),
        detail: format!(
            "{members} of {} chain elements in the closure (relative residual tolerance {MEMBERSHIP_TOL:e})",
            cx.m - 1
        ),
    })
}

/// The element list of the dimension count: `i x_jk ⊗ σ`, `i y_jk ⊗ σ`,
/// `i h_j ⊗ σ` for every `σ` (including `1_A`), and `i 1_S ⊗ σ` for `σ ≠ 1_A`.
pub fn chevalley_product_basis(n: usize, m: usize) -> Vec<StructuredOperator<Exact>> {
    let i = Exact::imag_unit();
    let mut out = Vec::new();
    for p in PauliString::all(m) {
        for j in 1..=n {
            for k in j + 1..=n {
                out.push(StructuredOperator::term(n, m, SystemBasisOp::X(j, k), p, i.clone()).expect("in range"));
                out.push(StructuredOperator::term(n, m, SystemBasisOp::Y(j, k), p, i.clone()).expect("in range"));
            }
        }
        for j in 1..n {
            out.push(StructuredOperator::term(n, m, SystemBasisOp::H(j), p, i.clone()).expect("in range"));
        }
        if !p.is_identity() {
            out.push(StructuredOperator::accessor(n, m, p, i.clone()).expect("in range"));
        }
    }
    out
}

fn theorem1_count(cx: &Ctx) -> Result<IdentityCheck> {
    const ID: &str = "theorem1.hs-chevalley";
    if cx.model.hilbert_dim() > 32 {
        return Ok(IdentityCheck::skipped(ID, "ambient space above 32 dimensions"));
    }
    let basis = chevalley_product_basis(cx.n, cx.m);
    let rank = exact_rank(&basis);
    let four = 1usize << (2 * cx.m);
    let count = (cx.n * cx.n - 1) + (cx.n * cx.n - 1) * (four - 1) + (four - 1);
    let expected = cx.model.expected_dim();
    let dev = [rank, basis.len(), count]
        .iter()
        .map(|&v| (v as f64 - expected as f64).abs())
        .sum();
    Ok(IdentityCheck::from_deviation(
        ID,
        dev,
        format!("{} elements, rank {rank}, count formula {count}, dim su({})", basis.len(), cx.model.hilbert_dim()),
    ))
}

/// `Some(g_xx)` when the only coupling is `g_xx σ_x ⊗ σ_x`.
fn simple_coupling(model: &ControlModel) -> Option<Exact> {
    let x: PauliString = "X".parse().ok()?;
    let mut g = num_rational::BigRational::zero();
    for cp in model.couplings() {
        if cp.j != 1 || cp.k != 1 || cp.alpha != x {
            return None;
        }
        g += &cp.g;
    }
    (!g.is_zero()).then(|| Exact::from_rational(&g))
}

fn eq2w1(cx: &Ctx) -> Result<IdentityCheck> {
    const ID: &str = "eq2w1";
    if cx.n != 2 || cx.m != 1 {
        return Ok(IdentityCheck::skipped(ID, "needs N = 2, M = 1"));
    }
    let Some(gxx) = simple_coupling(cx.model) else {
        return Ok(IdentityCheck::skipped(ID, "needs a single nonzero g_xx coupling"));
    };
    let i = Exact::imag_unit();
    let parts = drift_parts::<Exact>(cx.model);
    let ih0 = parts.total().scale(&i);
    let iy = cx.iacc("Y".parse().expect("label"));
    let ix_acc = cx.iacc("X".parse().expect("label"));
    let target = StructuredOperator::term(2, 1, SystemBasisOp::x(1), "Z".parse().expect("label"), i.clone())?;
    // (2g_xx)^{-1}(−[iH_0, i(1⊗σ_y)] + λ·i(1⊗σ_x)) = iσ_x⊗σ_z fixes λ.
    let need = &target.scale(&(q(2, 1) * gxx.clone())) + &ih0.commutator(&iy)?;
    let unit = Unit::new(1, 1);
    let lambda = need.coeff(unit, "X".parse().expect("label")) / i.clone();
    let lhs = (&ih0.commutator(&iy)?.scale(&q(-1, 1)) + &ix_acc.scale(&lambda)).scale(&(q(1, 2) / gxx));
    let omega1 = Exact::from_rational(&cx.model.omega()[0]);
    let dev = deviation(&lhs, &target);
    let matches = lambda == q(2, 1) * omega1;
    let detail = format!(
        "middle term resolved as {}·i(1_S x sigma_x){}",
        lambda.display(),
        if matches { " = 2 omega_I" } else { ", not 2 omega_I" }
    );
    Ok(IdentityCheck::from_deviation(ID, if matches { dev } else { dev.max(1.0) }, detail))
}

fn eq2w2(cx: &Ctx) -> Result<IdentityCheck> {
    const ID: &str = "eq2w2";
    if cx.n != 2 || cx.m != 1 {
        return Ok(IdentityCheck::skipped(ID, "needs N = 2, M = 1"));
    }
    let omega_s = cx.model.energies()[0].clone();
    if omega_s.is_zero() {
        return Ok(IdentityCheck::skipped(ID, "needs omega_S != 0"));
    }
    let i = Exact::imag_unit();
    let z: PauliString = "Z".parse().expect("label");
    let parts = drift_parts::<Exact>(cx.model);
    let sys = (&parts.system + &parts.excitation).scale(&i);
    let ixz = StructuredOperator::term(2, 1, SystemBasisOp::x(1), z, i.clone())?;
    let factor = Exact::from_rational(&(-(rational(1, 2) / omega_s.clone())));
    let lhs = sys.commutator(&ixz)?.scale(&factor);
    // σ_y = −y_1
    let rhs = StructuredOperator::term(2, 1, SystemBasisOp::y(1), z, -i)?;
    Ok(IdentityCheck::from_deviation(
        ID,
        deviation(&lhs, &rhs),
        format!("omega_S = {}; result {lhs}", format_rational(&omega_s)),
    ))
}

/// Evaluates every identity that applies to the model's dimensions. Checks
/// needing closure membership are skipped when `closure` is `None`.
pub fn verify_lemma_suite(model: &ControlModel, closure: Option<&ClosureResult>) -> Result<Vec<IdentityCheck>> {
    let cx = Ctx {
        model,
        n: model.n(),
        m: model.m(),
    };
    Ok(vec![
        lemma1(&cx)?,
        lemma2_sig3(&cx)?,
        lemma2_chain(&cx)?,
        lemma2_drop_site(&cx)?,
        lemma3_structure(&cx)?,
        lemma3_coefficients(&cx)?,
        lemma3_closing(&cx)?,
        lemma4_sigmaxxx(&cx)?,
        lemma4_membership(&cx, closure)?,
        theorem1_count(&cx)?,
        eq2w1(&cx)?,
        eq2w2(&cx)?,
    ])
}
