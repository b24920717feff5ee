//! Finite realizations of `𝔛(G)` and machine checks of its structure.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::enumerator::{enumerate, CosetTable, EnumerationConfig};
use crate::error::{Error, Result};
use crate::permgroups::{EngelClass, GroupHom, Nilpotency, Perm, PermGroup, DEFAULT_GUARD};
use crate::presentations::{sidki_double, Presentation, WitnessPolicy};
use crate::words::Word;
use crate::zqmodules;

/// Above this order the ℓ-identities are checked on a seeded sample of pairs.
const EXHAUSTIVE_ELL_LIMIT: usize = 100;
const ELL_SAMPLES: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BuildConfig {
    pub enumeration: EnumerationConfig,
    pub guard: usize,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig { enumeration: EnumerationConfig::default(), guard: DEFAULT_GUARD }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckResult {
    pub fn pass(name: &str) -> Self {
        CheckResult { name: name.into(), pass: true, witness: None, note: None }
    }

    pub fn fail(name: &str, witness: impl Into<String>) -> Self {
        CheckResult { name: name.into(), pass: false, witness: Some(witness.into()), note: None }
    }

    pub fn from_bool(name: &str, ok: bool, witness: impl FnOnce() -> String) -> Self {
        if ok {
            CheckResult::pass(name)
        } else {
            CheckResult::fail(name, witness())
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// `𝔛(G)` for a finite `G`, realized regularly on its cosets.
#[derive(Clone, Debug)]
pub struct XRealization {
    pub base: Presentation,
    pub double: Presentation,
    pub g_table: CosetTable,
    pub x_table: CosetTable,
    /// Regular realization of `G`.
    pub g: PermGroup,
    /// Elements of `G` (breadth-first, identity first) and a word for each.
    pub g_elements: Vec<Perm>,
    pub g_words: Vec<Word>,
    pub x: PermGroup,
    /// Images in `𝔛(G)` of `g`, `ḡ` and `ℓ_g` for each element of `G`.
    pub x_of_g: Vec<Perm>,
    pub x_of_gbar: Vec<Perm>,
    pub ell: Vec<Perm>,
    pub d: PermGroup,
    pub l: PermGroup,
    pub w: PermGroup,
    pub dl: PermGroup,
    pub g_image: PermGroup,
    pub g3: PermGroup,
    pub im_rho: PermGroup,
    pub rho: GroupHom,
    pub pi: GroupHom,
    pub kill: GroupHom,
}

impl XRealization {
    pub fn order(&self) -> u128 {
        self.x.order()
    }

    pub fn g_order(&self) -> usize {
        self.g_elements.len()
    }

    /// Image of a word over `X ∪ X̄`.
    pub fn eval(&self, w: &Word) -> Result<Perm> {
        self.x_table.word_image(w)
    }

    fn describe(&self, i: usize) -> String {
        self.g_words[self.g_elements[i].image(0) as usize].to_string()
    }
}

fn direct_sum3(a: &Perm, b: &Perm, c: &Perm) -> Perm {
    a.direct_sum(b).direct_sum(c)
}

/// Enumerate `G` and its double and assemble all subgroups and maps.
pub fn assemble(p: &Presentation, cfg: &BuildConfig) -> Result<XRealization> {
    if !p.is_single_copy() {
        return Err(Error::Argument("the base presentation must not use barred generators".into()));
    }
    let ecfg = &cfg.enumeration;
    let g_table = enumerate(p, &[], ecfg)?;
    let g = g_table.perm_realization_with_guard(cfg.guard);
    let g_words = g_table.coset_representatives();
    let g_elements = g.elements()?;
    let n = g_elements.len();

    let double = sidki_double(p, WitnessPolicy::AllElements, ecfg)?;
    let x_table = enumerate(&double, &[], ecfg)?;
    let x = x_table.perm_realization_with_guard(cfg.guard);

    let words: Vec<&Word> = g_elements.iter().map(|e| &g_words[e.image(0) as usize]).collect();
    let x_of_g = words.iter().map(|w| x_table.word_image(w)).collect::<Result<Vec<_>>>()?;
    let x_of_gbar = words.iter().map(|w| x_table.word_image(&w.bar())).collect::<Result<Vec<_>>>()?;
    let ell = words.iter().map(|w| x_table.word_image(&Word::ell(w))).collect::<Result<Vec<_>>>()?;

    let k = p.generators().len();
    let (xa, xb) = x.generators().split_at(k);
    let mut comms = Vec::new();
    for a in xa {
        for b in xb {
            comms.push(a.commutator(b));
        }
    }
    let d = x.normal_closure(&comms)?;
    let l = x.subgroup(ell[1..].to_vec())?;
    let w = d.intersection(&l)?;
    let dl = x.subgroup(d.generators().iter().chain(l.generators()).cloned().collect())?;
    let g_image = x.subgroup(xa.to_vec())?;

    let id = Perm::identity(n);
    let g3 = PermGroup::new(
        3 * n,
        g.generators()
            .iter()
            .flat_map(|s| [direct_sum3(s, &id, &id), direct_sum3(&id, s, &id), direct_sum3(&id, &id, s)])
            .collect(),
    )?
    .with_guard(cfg.guard);
    let rho_images: Vec<Perm> = g
        .generators()
        .iter()
        .map(|s| direct_sum3(s, s, &id))
        .chain(g.generators().iter().map(|s| direct_sum3(&id, s, s)))
        .collect();
    let rho = GroupHom::new(x.clone(), g3.clone(), rho_images)?;
    let im_rho = rho.image()?;

    let pi_images: Vec<Perm> = g.generators().iter().chain(g.generators()).cloned().collect();
    let pi = GroupHom::new(x.clone(), g.clone(), pi_images)?;

    let g2 = PermGroup::new(
        2 * n,
        g.generators().iter().flat_map(|s| [s.direct_sum(&id), id.direct_sum(s)]).collect(),
    )?
    .with_guard(cfg.guard);
    let kill_images: Vec<Perm> = g
        .generators()
        .iter()
        .map(|s| s.direct_sum(&id))
        .chain(g.generators().iter().map(|s| id.direct_sum(s)))
        .collect();
    let kill = GroupHom::new(x.clone(), g2, kill_images)?;

    Ok(XRealization {
        base: p.clone(),
        double,
        g_table,
        x_table,
        g,
        g_elements,
        g_words,
        x,
        x_of_g,
        x_of_gbar,
        ell,
        d,
        l,
        w,
        dl,
        g_image,
        g3,
        im_rho,
        rho,
        pi,
        kill,
    })
}

/// `assemble` followed by every structural check; any failure is an error.
pub fn build(p: &Presentation, cfg: &BuildConfig) -> Result<XRealization> {
    let xr = assemble(p, cfg)?;
    for c in run_checks(&xr)? {
        if !c.pass {
            return Err(Error::CheckFailed { check: c.name, witness: c.witness.unwrap_or_default() });
        }
    }
    Ok(xr)
}

fn commuting_witness(a: &[Perm], b: &[Perm]) -> Option<(usize, usize)> {
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            if x.mul(y) != y.mul(x) {
                return Some((i, j));
            }
        }
    }
    None
}

fn same_subgroup(a: &PermGroup, b: &PermGroup) -> bool {
    a.order() == b.order() && a.is_subgroup_of(b)
}

/// `im ρ` against `{(g₁,g₂,g₃) : g₁g₂⁻¹g₃ ∈ G′}` built inside `G³` without `ρ`.
pub fn check_im_rho(xr: &XRealization) -> Result<bool> {
    let n = xr.g_order();
    let gp = xr.g.derived_subgroup()?;
    let fg = zqmodules::FiniteGroup::new(&xr.g)?;
    let inv: Vec<usize> = (0..n).map(|a| (0..n).find(|&b| fg.mul(a, b) == 0).expect("inverse")).collect();
    let in_gp: Vec<bool> = xr.g_elements.iter().map(|e| gp.contains(e)).collect();
    let mut count: u128 = 0;
    for a in 0..n {
        for &ib in &inv {
            let ab = fg.mul(a, ib);
            count += (0..n).filter(|&c| in_gp[fg.mul(ab, c)]).count() as u128;
        }
    }
    if count != xr.im_rho.order() {
        return Ok(false);
    }
    // every generator of im ρ satisfies the constraint, so equal orders give equality
    for t in xr.im_rho.generators() {
        let parts: Vec<Perm> = (0..3).map(|k| t.restrict(k * n, n)).collect();
        let prod = parts[0].mul(&parts[1].inverse()).mul(&parts[2]);
        if !gp.contains(&prod) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `ℓ_u^x = ℓ_{ux}ℓ_x⁻¹` and `ℓ_u^{x̄} = ℓ_x⁻¹ℓ_{ux}`; exhaustive for small `G`.
pub fn ell_identity_check(xr: &XRealization, samples: Option<usize>) -> CheckResult {
    let n = xr.g_order();
    let fg = match zqmodules::FiniteGroup::new(&xr.g) {
        Ok(f) => f,
        Err(e) => return CheckResult::fail("ell_identities", e.to_string()),
    };
    let pairs: Vec<(usize, usize)> = match samples {
        None if n <= EXHAUSTIVE_ELL_LIMIT => (0..n).flat_map(|u| (0..n).map(move |x| (u, x))).collect(),
        s => {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
            (0..s.unwrap_or(ELL_SAMPLES)).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n))).collect()
        }
    };
    for &(u, x) in &pairs {
        let ux = fg.mul(u, x);
        let lhs = xr.ell[u].conjugate_by(&xr.x_of_g[x]);
        let rhs = xr.ell[ux].mul(&xr.ell[x].inverse());
        let lhs_bar = xr.ell[u].conjugate_by(&xr.x_of_gbar[x]);
        let rhs_bar = xr.ell[x].inverse().mul(&xr.ell[ux]);
        if lhs != rhs || lhs_bar != rhs_bar {
            return CheckResult::fail("ell_identities", format!("u = {}, x = {}", xr.describe(u), xr.describe(x)));
        }
    }
    CheckResult::pass("ell_identities").with_note(format!("{} pairs", pairs.len()))
}

pub fn run_checks(xr: &XRealization) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    let n = xr.g_order() as u128;
    let xo = xr.order();

    out.push(CheckResult::from_bool("regular_realization", xo == xr.x_table.n_cosets() as u128, || {
        format!("|X| = {xo}, cosets = {}", xr.x_table.n_cosets())
    }));
    let kill_img = xr.kill.image()?.order();
    out.push(CheckResult::from_bool("onto_G_x_Gbar", kill_img == n * n, || format!("image order {kill_img}")));
    let pi_img = xr.pi.image()?.order();
    out.push(CheckResult::from_bool("onto_G", pi_img == n, || format!("image order {pi_img}")));
    let kill_ker = xr.kill.kernel()?;
    out.push(CheckResult::from_bool("D_is_kernel_onto_G_x_Gbar", same_subgroup(&xr.d, &kill_ker), || {
        format!("|D| = {}, |ker| = {}", xr.d.order(), kill_ker.order())
    }));
    let pi_ker = xr.pi.kernel()?;
    out.push(CheckResult::from_bool("L_is_kernel_of_pi", same_subgroup(&xr.l, &pi_ker), || {
        format!("|L| = {}, |ker| = {}", xr.l.order(), pi_ker.order())
    }));

    let dl_fail = commuting_witness(xr.d.generators(), xr.l.generators());
    out.push(CheckResult::from_bool("D_commutes_with_L", dl_fail.is_none(), || {
        let (i, j) = dl_fail.expect("witness");
        format!("D generator {} and L generator {}", xr.d.generators()[i], xr.l.generators()[j])
    }));
    let w_in = xr.w.is_subgroup_of(&xr.d) && xr.w.is_subgroup_of(&xr.l);
    out.push(CheckResult::from_bool("W_is_D_cap_L", w_in, || "W is not contained in D and L".into()));
    let ker_rho = xr.rho.kernel()?;
    out.push(CheckResult::from_bool("W_is_ker_rho", same_subgroup(&xr.w, &ker_rho), || {
        format!("|W| = {}, |ker rho| = {}", xr.w.order(), ker_rho.order())
    }));
    let wc = commuting_witness(xr.w.generators(), xr.dl.generators());
    out.push(CheckResult::from_bool("W_central_in_DL", wc.is_none(), || {
        let (i, j) = wc.expect("witness");
        format!("{} and {}", xr.w.generators()[i], xr.dl.generators()[j])
    }));
    let wo = xr.w.order();
    let io = xr.im_rho.order();
    out.push(CheckResult::from_bool("exact_sequence_orders", xo == wo * io, || {
        format!("|X| = {xo}, |W| = {wo}, |im rho| = {io}")
    }));
    let q = xr.base.abelianization().order().and_then(|o| crate::intlinalg::to_u64(&o)).map(u128::from);
    let g3o = xr.g3.order();
    out.push(CheckResult::from_bool("im_rho_index_is_Q", q.is_some_and(|q| g3o == io * q), || {
        format!("[G^3 : im rho] = {}/{}, |Q| = {:?}", g3o, io, q)
    }));
    out.push(CheckResult::from_bool("im_rho_constraint_subgroup", check_im_rho(xr)?, || {
        "im rho differs from {(g1,g2,g3) : g1 g2^-1 g3 in G'}".into()
    }));

    let meet = xr.l.intersection(&xr.g_image)?;
    let split = meet.order() == 1 && xr.l.order() * xr.g_image.order() == xo && xr.g_image.order() == n;
    out.push(CheckResult::from_bool("splitting_L_by_G", split, || {
        format!("|L cap G| = {}, |L| = {}, |G image| = {}", meet.order(), xr.l.order(), xr.g_image.order())
    }));
    out.push(ell_identity_check(xr, None));
    let ncl = xr.x.normal_closure(xr.l.generators())?;
    out.push(CheckResult::from_bool("L_generated_by_ells", ncl.order() == xr.l.order(), || {
        format!("|<ell>| = {}, normal closure {}", xr.l.order(), ncl.order())
    }));
    if xr.g.is_perfect()? {
        let c = commuting_witness(xr.w.generators(), xr.x.generators());
        out.push(CheckResult::from_bool("W_central_when_G_perfect", c.is_none(), || {
            let (i, j) = c.expect("witness");
            format!("{} and {}", xr.w.generators()[i], xr.x.generators()[j])
        }));
    } else {
        out.push(CheckResult::pass("W_central_when_G_perfect").with_note("vacuous: G is not perfect"));
    }
    out.push(zqmodules::compare_l_abelianization(xr)?);
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NilpotenceReport {
    pub g: Nilpotency,
    pub x: Nilpotency,
    /// `G` nilpotent implies `𝔛(G)` nilpotent.
    pub consistent: bool,
}

pub fn nilpotence_report(xr: &XRealization) -> Result<NilpotenceReport> {
    let g = xr.g.nilpotency_class()?;
    let x = xr.x.nilpotency_class()?;
    let consistent = !(matches!(g, Nilpotency::Class(_)) && x == Nilpotency::NotNilpotent);
    Ok(NilpotenceReport { g, x, consistent })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EngelCertificate {
    pub n: usize,
    pub d: usize,
    pub s: usize,
    pub m: usize,
    pub verdict: bool,
    /// Least `k ≤ m` for which `𝔛(G)` is `k`-Engel, when computed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub minimal_class_x: Option<usize>,
}

/// Engel bound `m = n + d + s + 3` and its verification on the realization.
pub fn engel_certificate(xr: &XRealization, minimal: bool) -> Result<EngelCertificate> {
    let cap = xr.g_order() + 1;
    let n = match xr.g.minimal_engel_class(cap)? {
        EngelClass::Class(n) => n,
        EngelClass::ExceedsCap { .. } => return Err(Error::NotEngel(cap)),
    };
    let g2 = xr.g.derived_subgroup()?.derived_subgroup()?;
    let d = match xr.g.quotient(&g2)?.nilpotency_class()? {
        Nilpotency::Class(d) => d,
        Nilpotency::NotNilpotent => return Err(Error::NotEngel(cap)),
    };
    let v = zqmodules::aug_mod_i2(&xr.g)?;
    let vcap = v.default_cap();
    let s = v.action_nilpotency_class(vcap).class().ok_or_else(|| Error::CheckFailed {
        check: "action_on_L_mod_L'_nilpotent".into(),
        witness: format!("no class below cap {vcap}"),
    })?;
    let m = n + d + s + 3;
    let (verdict, minimal_class_x) = if minimal {
        match xr.x.minimal_engel_class(m)? {
            EngelClass::Class(k) => (true, Some(k)),
            EngelClass::ExceedsCap { .. } => (false, None),
        }
    } else {
        (xr.x.is_n_engel(m)?, None)
    };
    Ok(EngelCertificate { n, d, s, m, verdict, minimal_class_x })
}

#[derive(Clone, Debug, Serialize)]
pub struct Orders {
    pub g: u128,
    pub x: u128,
    pub d: u128,
    pub l: u128,
    pub w: u128,
    pub dl: u128,
    pub im_rho: u128,
}

pub fn orders(xr: &XRealization) -> Orders {
    Orders {
        g: xr.g.order(),
        x: xr.x.order(),
        d: xr.d.order(),
        l: xr.l.order(),
        w: xr.w.order(),
        dl: xr.dl.order(),
        im_rho: xr.im_rho.order(),
    }
}

/// `{group, orders, checks, engel?, classes?, w_structure?}`.
pub fn verification_report(
    xr: &XRealization,
    checks: &[CheckResult],
    engel: Option<&EngelCertificate>,
    classes: Option<&NilpotenceReport>,
    w_structure: Option<&zqmodules::WStructureReport>,
) -> serde_json::Value {
    let mut v = serde_json::json!({
        "group": xr.base.to_string(),
        "orders": orders(xr),
        "checks": checks,
    });
    let obj = v.as_object_mut().expect("object");
    if let Some(e) = engel {
        obj.insert("engel".into(), serde_json::to_value(e).expect("serializable"));
    }
    if let Some(c) = classes {
        obj.insert("classes".into(), serde_json::to_value(c).expect("serializable"));
    }
    if let Some(w) = w_structure {
        obj.insert("w_structure".into(), serde_json::to_value(w).expect("serializable"));
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn built(s: &str) -> XRealization {
        build(&Presentation::parse(s).unwrap(), &BuildConfig::default()).unwrap()
    }

    #[test]
    fn c2() {
        let xr = built("<a|a^2>");
        let o = orders(&xr);
        assert_eq!((o.x, o.d, o.l, o.w), (4, 1, 2, 1));
        let nil = nilpotence_report(&xr).unwrap();
        assert_eq!((nil.g, nil.x), (Nilpotency::Class(1), Nilpotency::Class(1)));
        // C2: im ρ has order 4, g₂ = g₁g₃
        assert_eq!(o.im_rho, 4);
    }

    #[test]
    fn s3() {
        let xr = built("<a,b|a^2,b^2,(a b)^3>");
        let o = orders(&xr);
        assert_eq!(o.im_rho, 108);
        assert_eq!(xr.g3.order() / o.im_rho, 2);
        assert_eq!(o.x, o.w * o.im_rho);
        assert_eq!(nilpotence_report(&xr).unwrap().g, Nilpotency::NotNilpotent);
        assert!(matches!(engel_certificate(&xr, false), Err(Error::NotEngel(_))));
    }

    #[test]
    fn d_from_generators_matches_all_pairs() {
        for s in ["<a,b|a^2,b^2,[a,b]>", "<a,b|a^2,b^2,(a b)^3>"] {
            let xr = built(s);
            let mut comms = Vec::new();
            for x in &xr.x_of_g {
                for y in &xr.x_of_gbar {
                    comms.push(x.commutator(y));
                }
            }
            let full = xr.x.normal_closure(&comms).unwrap();
            assert_eq!(full.order(), xr.d.order(), "{s}");
        }
    }

    #[test]
    fn engel_for_abelian() {
        let xr = built("<a|a^4>");
        let e = engel_certificate(&xr, true).unwrap();
        assert_eq!((e.n, e.d), (1, 1));
        assert_eq!(e.m, e.s + 5);
        assert!(e.verdict);
        assert!(e.minimal_class_x.unwrap() <= e.m);
    }

    #[test]
    fn klein_four() {
        let xr = built("<a,b|a^2,b^2,[a,b]>");
        assert_eq!(xr.order(), 32);
        assert_eq!(xr.w.order(), 2);
        let report = verification_report(&xr, &run_checks(&xr).unwrap(), None, None, None);
        assert_eq!(report["orders"]["im_rho"], 16);
    }

    #[test]
    fn rejects_barred_input() {
        let p = Presentation::parse("<a, a~ | a^2>").unwrap();
        assert!(assemble(&p, &BuildConfig::default()).is_err());
    }
}
