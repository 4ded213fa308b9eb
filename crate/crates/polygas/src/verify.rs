//! Machine checks of the structural inequalities on enumerable instances.
//! Every decision is made on exact rationals; floats appear only as witness
//! renderings next to the exact values that decided the check.

use num::{One, Signed, Zero};

use crate::criteria::{fp_radii, MuVector};
use crate::error::{Error, Result};
use crate::mayer::{abs_increment_ratio, ursell};
use crate::model::{PolymerId, PolymerSubset, PolymerSystem, SubsetGas};
use crate::numeric::{ln_rational, rational_to_f64, ratio_str, sig12, Rational};
use crate::partition::{z_recursive, ActivityVector, SubsetTables};

pub const LOG_TOLERANCE: f64 = 1e-12;
/// Largest order the exhaustive tuple sweep will take.
pub const ALTERNATING_CAP: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    Skip(String),
}

impl CheckStatus {
    pub fn token(&self) -> &str {
        match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
            CheckStatus::Skip(_) => "skip",
        }
    }
}

/// One reported check: a name, a compact instance descriptor (no spaces),
/// and witness tokens sufficient to reproduce the decision by hand.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub instance: String,
    pub status: CheckStatus,
    pub witness: String,
}

impl Check {
    pub fn line(&self) -> String {
        let mut s = format!(
            "CHECK {} {} {}",
            self.name,
            if self.instance.is_empty() { "-" } else { &self.instance },
            self.status.token()
        );
        if let CheckStatus::Skip(reason) = &self.status {
            s.push_str(&format!(" reason={reason}"));
        }
        if !self.witness.is_empty() {
            s.push(' ');
            s.push_str(&self.witness);
        }
        s
    }
}

#[derive(Debug, Clone, Default)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, name: &str, instance: String, status: CheckStatus, witness: String) {
        self.checks.push(Check { name: name.to_string(), instance, status, witness });
    }

    pub fn merge(&mut self, other: VerificationReport) {
        self.checks.extend(other.checks);
    }

    /// (pass, fail, skip) counts over reported lines.
    pub fn counts(&self) -> (usize, usize, usize) {
        let mut c = (0, 0, 0);
        for check in &self.checks {
            match check.status {
                CheckStatus::Pass => c.0 += 1,
                CheckStatus::Fail => c.1 += 1,
                CheckStatus::Skip(_) => c.2 += 1,
            }
        }
        c
    }

    pub fn all_passed(&self) -> bool {
        self.counts().1 == 0
    }

    pub fn render_lines(&self) -> String {
        let mut out = String::new();
        for check in &self.checks {
            out.push_str(&check.line());
            out.push('\n');
        }
        out
    }

    pub fn summary_line(&self) -> String {
        let (pass, fail, skip) = self.counts();
        format!("SUMMARY pass={pass} fail={fail} skip={skip}")
    }
}

fn subset_token(s: &PolymerSubset) -> String {
    let inner: Vec<String> = s.iter().map(|x| x.to_string()).collect();
    format!("{{{}}}", inner.join(","))
}

/// First polymer whose activity falls outside [0, sharp radius], if any.
fn hypothesis_gap(
    system: &PolymerSystem,
    p: &ActivityVector,
    mu: &MuVector,
    cap: usize,
) -> Result<Option<(PolymerId, Rational, Rational)>> {
    p.check_matches(system, "activities")?;
    let radii = fp_radii(system, mu, cap)?;
    for x in 0..system.len() {
        if p.get(x).is_negative() || p.get(x) > radii.get(x) {
            return Ok(Some((x, p.get(x).clone(), radii.get(x).clone())));
        }
    }
    Ok(None)
}

/// Exhaustively checks, over every configuration S inside the volume and
/// every member x, that the negated-activity ratio Q_S/Q_{S minus x}
/// dominates the reference ratio Z over the complement volumes. One
/// aggregated line on success; every failing pair gets its own line.
pub fn verify_ratio_inequality(
    system: &PolymerSystem,
    volume: &PolymerSubset,
    p: &ActivityVector,
    mu: &MuVector,
    cap: usize,
    label: &str,
) -> Result<VerificationReport> {
    mu.check_matches(system, "reference weights")?;
    let mut report = VerificationReport::new();
    if let Some((x, px, rx)) = hypothesis_gap(system, p, mu, cap)? {
        report.push(
            "ratio",
            label.to_string(),
            CheckStatus::Skip("hypothesis-unmet".to_string()),
            format!("x={x} p={} radius={}", ratio_str(&px), ratio_str(&rx)),
        );
        return Ok(report);
    }
    let q_tab = SubsetTables::build(system, volume, &p.negated(), cap)?;
    let z_tab = SubsetTables::build(system, volume, mu.as_activities(), cap)?;
    let full = q_tab.full_mask();
    let mut pairs = 0usize;
    let mut fails = 0usize;
    for s_mask in 0..=full {
        let mut rest = s_mask;
        while rest != 0 {
            let bit = rest & rest.wrapping_neg();
            rest &= rest - 1;
            pairs += 1;
            let q_s = q_tab.by_mask(s_mask);
            let q_sx = q_tab.by_mask(s_mask & !bit);
            let z_c = z_tab.by_mask(full & !s_mask);
            let z_cx = z_tab.by_mask((full & !s_mask) | bit);
            let positive = q_s.is_positive() && q_sx.is_positive();
            // All factors positive, so cross-multiplied comparison is safe.
            if !positive || q_s * z_cx < q_sx * z_c {
                fails += 1;
                let s = q_tab.subset_of(s_mask);
                let x = q_tab.subset_of(bit).into_iter().next().expect("one bit");
                report.push(
                    "ratio",
                    format!("{label},S={},x={x}", subset_token(&s)),
                    CheckStatus::Fail,
                    format!(
                        "qs={} qsx={} zc={} zcx={}",
                        ratio_str(q_s),
                        ratio_str(q_sx),
                        ratio_str(z_c),
                        ratio_str(z_cx)
                    ),
                );
            }
        }
    }
    report.push(
        "ratio",
        label.to_string(),
        if fails == 0 { CheckStatus::Pass } else { CheckStatus::Fail },
        format!("pairs={pairs} fails={fails}"),
    );
    Ok(report)
}

/// Checks the increment majorant against log(1 + mu_x) for every polymer of
/// the volume: the exact ratio form first, then the float log with slack.
pub fn verify_log_bound(
    system: &PolymerSystem,
    volume: &PolymerSubset,
    p: &ActivityVector,
    mu: &MuVector,
    cap: usize,
    label: &str,
) -> Result<VerificationReport> {
    mu.check_matches(system, "reference weights")?;
    let mut report = VerificationReport::new();
    if let Some((x, px, rx)) = hypothesis_gap(system, p, mu, cap)? {
        report.push(
            "log-bound",
            label.to_string(),
            CheckStatus::Skip("hypothesis-unmet".to_string()),
            format!("x={x} p={} radius={}", ratio_str(&px), ratio_str(&rx)),
        );
        return Ok(report);
    }
    for &x in volume {
        let instance = format!("{label},x={x}");
        let bound_ratio = Rational::one() + mu.get(x);
        match abs_increment_ratio(system, volume, x, p) {
            Ok(ratio) => {
                let exact_ok = ratio <= bound_ratio;
                let theta = ln_rational(&ratio);
                let log_bound = ln_rational(&bound_ratio);
                let float_ok = theta <= log_bound + LOG_TOLERANCE;
                report.push(
                    "log-bound",
                    instance,
                    if exact_ok && float_ok { CheckStatus::Pass } else { CheckStatus::Fail },
                    format!(
                        "ratio={} bound={} theta={} logbound={}",
                        ratio_str(&ratio),
                        ratio_str(&bound_ratio),
                        sig12(theta),
                        sig12(log_bound)
                    ),
                );
            }
            Err(Error::OutsidePositivity { witness }) => {
                // Under a met hypothesis this would falsify the bound.
                report.push("log-bound", instance, CheckStatus::Fail, witness);
            }
            Err(e) => return Err(e),
        }
    }
    Ok(report)
}

/// Verifies each link of the ratio inequality's supporting argument at one
/// pivot: the deletion identity, the radius hypothesis, subadditivity of Z
/// over a volume split, monotonicity in the volume, the insertion inequality
/// over every configuration containing the pivot, and the endpoint ratio
/// against 1 + mu_x.
pub fn verify_chain_steps(
    system: &PolymerSystem,
    volume: &PolymerSubset,
    x: PolymerId,
    p: &ActivityVector,
    mu: &MuVector,
    cap: usize,
    label: &str,
) -> Result<VerificationReport> {
    mu.check_matches(system, "reference weights")?;
    p.check_matches(system, "activities")?;
    if !volume.contains(&x) {
        return Err(Error::NotASubset { what: format!("chain pivot {x} in the volume") });
    }
    let mut report = VerificationReport::new();
    let instance = format!("{label},x={x}");
    let mw = mu.as_activities();

    let z_vol = z_recursive(system, volume, mw)?;
    let minus_x: PolymerSubset = volume.iter().copied().filter(|&y| y != x).collect();
    let z_minus_x = z_recursive(system, &minus_x, mw)?;
    let hood = system.closed_neighborhood(x);
    let reduced: PolymerSubset = volume.difference(hood).copied().collect();
    let z_reduced = z_recursive(system, &reduced, mw)?;
    let identity_ok = z_vol == &z_minus_x + mu.get(x) * &z_reduced;
    report.push(
        "chain-identity",
        instance.clone(),
        if identity_ok { CheckStatus::Pass } else { CheckStatus::Fail },
        format!(
            "z={} zminus={} zreduced={}",
            ratio_str(&z_vol),
            ratio_str(&z_minus_x),
            ratio_str(&z_reduced)
        ),
    );

    let z_hood = z_recursive(system, hood, mw)?;
    let hypothesis_ok = !p.get(x).is_negative() && mu.get(x) >= &(p.get(x) * &z_hood);
    report.push(
        "chain-hypothesis",
        instance.clone(),
        if hypothesis_ok { CheckStatus::Pass } else { CheckStatus::Fail },
        format!("mu={} p={} denom={}", ratio_str(mu.get(x)), ratio_str(p.get(x)), ratio_str(&z_hood)),
    );

    let union: PolymerSubset = volume.union(hood).copied().collect();
    let z_union = z_recursive(system, &union, mw)?;
    let subadd_ok = &z_hood * &z_reduced >= z_union;
    report.push(
        "chain-subadditivity",
        instance.clone(),
        if subadd_ok { CheckStatus::Pass } else { CheckStatus::Fail },
        format!(
            "hood={} reduced={} union={}",
            ratio_str(&z_hood),
            ratio_str(&z_reduced),
            ratio_str(&z_union)
        ),
    );

    let mono_ok = z_union >= z_vol;
    report.push(
        "chain-monotonicity",
        instance.clone(),
        if mono_ok { CheckStatus::Pass } else { CheckStatus::Fail },
        format!("union={} z={}", ratio_str(&z_union), ratio_str(&z_vol)),
    );

    if hypothesis_ok {
        // Insertion: putting x back into any complement volume gains at
        // least p_x times Z over the complement joined with x's conflicts
        // inside the configuration.
        let z_tab = SubsetTables::build(system, volume, mw, cap)?;
        let full = z_tab.full_mask();
        let x_bit = z_tab.dense_mask_of_id(x);
        let hood_mask = z_tab.dense_mask_of(hood);
        let mut pairs = 0usize;
        let mut fails = 0usize;
        for s_mask in 0..=full {
            if s_mask & x_bit == 0 {
                continue;
            }
            pairs += 1;
            let comp = full & !s_mask;
            let lhs = z_tab.by_mask(comp | x_bit);
            let gain = z_tab.by_mask(comp | (hood_mask & s_mask));
            if lhs < &(z_tab.by_mask(comp) + p.get(x) * gain) {
                fails += 1;
                report.push(
                    "chain-insertion",
                    format!("{label},x={x},S={}", subset_token(&z_tab.subset_of(s_mask))),
                    CheckStatus::Fail,
                    format!(
                        "lhs={} base={} gain={}",
                        ratio_str(lhs),
                        ratio_str(z_tab.by_mask(comp)),
                        ratio_str(gain)
                    ),
                );
            }
        }
        report.push(
            "chain-insertion",
            instance.clone(),
            if fails == 0 { CheckStatus::Pass } else { CheckStatus::Fail },
            format!("pairs={pairs} fails={fails}"),
        );

        match abs_increment_ratio(system, volume, x, p) {
            Ok(ratio) => {
                let bound = Rational::one() + mu.get(x);
                report.push(
                    "chain-endpoint",
                    instance,
                    if ratio <= bound { CheckStatus::Pass } else { CheckStatus::Fail },
                    format!("ratio={} bound={}", ratio_str(&ratio), ratio_str(&bound)),
                );
            }
            Err(Error::OutsidePositivity { witness }) => {
                report.push("chain-endpoint", instance, CheckStatus::Fail, witness);
            }
            Err(e) => return Err(e),
        }
    } else {
        let skip = CheckStatus::Skip("hypothesis-unmet".to_string());
        report.push("chain-insertion", instance.clone(), skip.clone(), String::new());
        report.push("chain-endpoint", instance, skip, String::new());
    }
    Ok(report)
}

/// Exhaustively confirms that cluster coefficients alternate in sign: at
/// order n the coefficient times (-1)^(n-1) is nonnegative, for every tuple
/// over the whole system up to `max_n`.
pub fn verify_alternating_sign(
    system: &PolymerSystem,
    max_n: usize,
) -> Result<VerificationReport> {
    if max_n == 0 {
        return Err(Error::ZeroOrder);
    }
    if max_n > ALTERNATING_CAP {
        return Err(Error::CapExceeded {
            what: "alternating-sign order",
            size: max_n,
            cap: ALTERNATING_CAP,
            hint: "lower --order",
        });
    }
    let n_sys = system.len();
    if n_sys == 0 {
        return Err(Error::EmptyFamily);
    }
    let budget: usize = 1_000_000;
    if n_sys.checked_pow(max_n as u32).map_or(true, |t| t > budget) {
        return Err(Error::CapExceeded {
            what: "alternating-sign tuple sweep",
            size: n_sys,
            cap: budget,
            hint: "use a smaller system",
        });
    }
    let mut report = VerificationReport::new();
    for n in 1..=max_n {
        let mut tuple = vec![0usize; n];
        let mut tuples = 0usize;
        let mut fails = 0usize;
        loop {
            tuples += 1;
            let v = ursell(system, &tuple, max_n)?;
            let signed = if n % 2 == 0 { -v.clone() } else { v.clone() };
            if signed.is_negative() {
                fails += 1;
                report.push(
                    "alternating-sign",
                    format!("t={tuple:?}").replace(' ', ""),
                    CheckStatus::Fail,
                    format!("value={}", ratio_str(&v)),
                );
            }
            let mut k = n;
            let mut carried = true;
            while k > 0 {
                k -= 1;
                tuple[k] += 1;
                if tuple[k] < n_sys {
                    carried = false;
                    break;
                }
                tuple[k] = 0;
            }
            if carried {
                break;
            }
        }
        report.push(
            "alternating-sign",
            format!("n={n}"),
            if fails == 0 { CheckStatus::Pass } else { CheckStatus::Fail },
            format!("tuples={tuples} fails={fails}"),
        );
    }
    Ok(report)
}

/// Checks the finite-volume pressure bound for a subset gas: with weights
/// within the certified radii, |log Z over the polymers inside the site set|
/// stays below K times the site count, and below the per-site sum of
/// log(1 + mu_x). K is the truncation's largest per-site weight sum.
pub fn verify_pressure_bound(
    gas: &SubsetGas,
    lambda_sites: &std::collections::BTreeSet<usize>,
    w: &ActivityVector,
    mu: &MuVector,
    cap: usize,
) -> Result<VerificationReport> {
    let system = &gas.system;
    w.check_matches(system, "activities")?;
    mu.check_matches(system, "reference weights")?;
    for &v in lambda_sites {
        if v >= gas.sites {
            return Err(Error::BadSubsetGasSpec(format!(
                "site {v} outside space of {} sites",
                gas.sites
            )));
        }
    }
    let mut report = VerificationReport::new();

    // Polymers living inside the site set.
    let p_lambda: PolymerSubset = (0..system.len())
        .filter(|&x| gas.members[x].is_subset(lambda_sites))
        .collect();
    let site_count = lambda_sites.len();
    let instance = format!("sites={site_count},polymers={}", p_lambda.len());

    let radii = fp_radii(system, mu, cap)?;
    let mut unmet = None;
    for &x in &p_lambda {
        if &w.get(x).abs() > radii.get(x) {
            unmet = Some(x);
            break;
        }
    }
    if let Some(x) = unmet {
        let skip = CheckStatus::Skip("hypothesis-unmet".to_string());
        let witness = format!(
            "x={x} w={} radius={}",
            ratio_str(w.get(x)),
            ratio_str(radii.get(x))
        );
        report.push("pressure-hypothesis", instance.clone(), skip.clone(), witness);
        report.push("pressure-bound", instance.clone(), skip.clone(), String::new());
        report.push("pressure-site-bound", instance, skip, String::new());
        return Ok(report);
    }
    report.push(
        "pressure-hypothesis",
        instance.clone(),
        CheckStatus::Pass,
        format!("pairs={}", p_lambda.len()),
    );

    // K (truncated): the largest per-site weight sum over every generated
    // polymer, not only those inside the site set.
    let mut k_trunc = Rational::zero();
    for &v in lambda_sites {
        let mut sum = Rational::zero();
        for x in 0..system.len() {
            if gas.members[x].contains(&v) {
                sum += mu.get(x);
            }
        }
        k_trunc = k_trunc.max(sum);
    }

    let z = z_recursive(system, &p_lambda, w)?;
    if !z.is_positive() {
        report.push(
            "pressure-bound",
            instance.clone(),
            CheckStatus::Fail,
            format!("z={}", ratio_str(&z)),
        );
        report.push("pressure-site-bound", instance, CheckStatus::Fail, String::new());
        return Ok(report);
    }
    let abs_ln_z = ln_rational(&z).abs();
    let k_bound = rational_to_f64(&k_trunc) * site_count as f64;
    report.push(
        "pressure-bound",
        instance.clone(),
        if abs_ln_z <= k_bound + LOG_TOLERANCE { CheckStatus::Pass } else { CheckStatus::Fail },
        format!(
            "abslnz={} K={} sites={site_count} bound={}",
            sig12(abs_ln_z),
            ratio_str(&k_trunc),
            sig12(k_bound)
        ),
    );

    let mut site_bound = 0.0;
    for &v in lambda_sites {
        for &x in &p_lambda {
            if gas.members[x].contains(&v) {
                site_bound += ln_rational(&(Rational::one() + mu.get(x)));
            }
        }
    }
    report.push(
        "pressure-site-bound",
        instance,
        if abs_ln_z <= site_bound + LOG_TOLERANCE { CheckStatus::Pass } else { CheckStatus::Fail },
        format!("abslnz={} sitebound={}", sig12(abs_ln_z), sig12(site_bound)),
    );
    Ok(report)
}
