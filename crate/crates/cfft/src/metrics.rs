//! Static complexity accounting and empirical bound tables.
//!
//! [`count`] walks plan structures without running a transform and reports
//! genuine multiplications (after constant elision), raw products, additions
//! inside the convolutions, the addition-network breakdown and the direct
//! row-XOR baseline. The weighted total prices one multiplication in
//! GF(2^m) at 2m - 1 additions.
//!
//! [`bound_table`] compares measured counts against the closed-form shapes
//! n * (log2 n)^log2(3/2) for multiplications and n^2 / (log2 n)^log2(8/3)
//! for network additions. The shapes carry no absolute constant, so the
//! scale is fitted at an anchor degree and everything else is reported as a
//! ratio against the scaled curve. Bound rows are measured on plans built
//! with the short-convolution profile, the strongest algorithms this crate
//! generates; [`count`] reports whatever profile the given plan uses.

use crate::addnet::{build_addnet, direct_add_count, AdditionNetworkPlan, AddnetCounts};
use crate::planner::{build_block_form, build_plan_with, CfftPlan, ConvProfile};
use crate::gf2m::FieldSpec;
use crate::{Error, Result};

/// Static operation counts of one plan (and, when given, its network).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ComplexityReport {
    pub m: usize,
    pub n: usize,
    pub k: usize,
    /// Genuine field multiplications: raw products minus 0/1-constant
    /// elisions.
    pub mults: u64,
    /// Sum of the per-coset product counts before elision.
    pub mults_raw: u64,
    pub conv_pre_adds: u64,
    pub conv_post_adds: u64,
    pub adds_addnet: Option<AddnetCounts>,
    pub adds_direct: u64,
    pub total_weighted: u64,
    pub profile: ConvProfile,
}

impl ComplexityReport {
    /// Additions inside the convolutions (pre plus post).
    pub fn adds_conv(&self) -> u64 {
        self.conv_pre_adds + self.conv_post_adds
    }
}

/// Weight of one multiplication, in additions: 2m - 1.
pub fn mult_weight(m: usize) -> u64 {
    2 * m as u64 - 1
}

/// Purely static traversal of the plan (and optional network) structures.
pub fn count(plan: &CfftPlan, netplan: Option<&AdditionNetworkPlan>) -> ComplexityReport {
    let mut mults = 0u64;
    let mut mults_raw = 0u64;
    let mut conv_pre = 0u64;
    let mut conv_post = 0u64;
    for coset in &plan.partition.cosets {
        let sc = plan.size_class(coset.size());
        let st = sc.conv.static_tally();
        mults += st.mults;
        mults_raw += sc.conv.base.r as u64;
        conv_pre += st.pre_adds;
        conv_post += st.post_adds;
    }
    let adds_addnet = netplan.map(|np| np.static_counts);
    let adds_direct = direct_add_count(&plan.recombine);
    // The recombination additions use the network when present, otherwise
    // the direct baseline.
    let av_adds = adds_addnet.map_or(adds_direct, |c| c.total());
    let m = plan.field.degree();
    ComplexityReport {
        m,
        n: plan.n,
        k: plan.partition.k(),
        mults,
        mults_raw,
        conv_pre_adds: conv_pre,
        conv_post_adds: conv_post,
        adds_addnet,
        adds_direct,
        total_weighted: mult_weight(m) * mults + conv_pre + conv_post + av_adds,
        profile: plan.profile,
    }
}

/// Multiplicative shape n * (log2 n)^log2(3/2) at n = 2^m - 1.
pub fn mult_shape(m: usize) -> f64 {
    let n = ((1u64 << m) - 1) as f64;
    n * n.log2().powf(1.5f64.log2())
}

/// Additive shape n^2 / (log2 n)^log2(8/3) at n = 2^m - 1.
pub fn add_shape(m: usize) -> f64 {
    let n = ((1u64 << m) - 1) as f64;
    n * n / n.log2().powf((8.0f64 / 3.0).log2())
}

/// One degree of a bound table.
#[derive(Clone, Debug)]
pub struct BoundRow {
    pub report: ComplexityReport,
    /// Scaled curve values (fitted at the anchor degree).
    pub bound_mult: f64,
    pub bound_add: f64,
    pub ratio_mult: f64,
    pub ratio_add: f64,
}

/// Measured counts versus scaled bound curves over a degree range.
#[derive(Clone, Debug)]
pub struct BoundTable {
    pub anchor_m: usize,
    pub scale_mult: f64,
    pub scale_add: f64,
    pub rows: Vec<BoundRow>,
}

/// Builds full-length plans (short-convolution profile) with their networks
/// for every degree in the range, fits both curve scales at `anchor_m`, and
/// reports measured counts against the scaled curves.
pub fn bound_table(m_min: usize, m_max: usize, anchor_m: usize) -> Result<BoundTable> {
    if !(m_min..=m_max).contains(&anchor_m) {
        return Err(Error::PlanDocument(format!(
            "anchor degree {anchor_m} outside range {m_min}..={m_max}"
        )));
    }
    let mut reports = Vec::new();
    for m in m_min..=m_max {
        let field = FieldSpec::new(m, None)?;
        let plan = build_plan_with(&field, field.group_order(), ConvProfile::ShortConvolution)?;
        let net = build_addnet(build_block_form(&plan)?)?;
        reports.push(count(&plan, Some(&net)));
    }
    let anchor = &reports[anchor_m - m_min];
    let scale_mult = anchor.mults as f64 / mult_shape(anchor_m);
    let scale_add =
        anchor.adds_addnet.expect("network built").total() as f64 / add_shape(anchor_m);
    let rows = reports
        .into_iter()
        .map(|report| {
            let bound_mult = scale_mult * mult_shape(report.m);
            let bound_add = scale_add * add_shape(report.m);
            BoundRow {
                ratio_mult: report.mults as f64 / bound_mult,
                ratio_add: report.adds_addnet.expect("network built").total() as f64 / bound_add,
                bound_mult,
                bound_add,
                report,
            }
        })
        .collect();
    Ok(BoundTable {
        anchor_m,
        scale_mult,
        scale_add,
        rows,
    })
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

pub const CSV_HEADER: &str = "m,n,k,mults,adds_conv,adds_addnet,adds_direct,total_weighted,bound_mult,bound_add,ratio_mult,ratio_add";

/// One CSV row of the shared count/bounds schema; ratios carry four
/// fractional digits, bounds are rounded to integers.
pub fn csv_row(
    report: &ComplexityReport,
    bound_mult: f64,
    bound_add: f64,
    ratio_mult: f64,
    ratio_add: f64,
) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{:.0},{:.0},{:.4},{:.4}",
        report.m,
        report.n,
        report.k,
        report.mults,
        report.adds_conv(),
        report.adds_addnet.map_or(0, |c| c.total()),
        report.adds_direct,
        report.total_weighted,
        bound_mult,
        bound_add,
        ratio_mult,
        ratio_add,
    )
}

/// CSV row for a single report, with the unscaled curve shapes in the bound
/// columns (a lone degree has nothing to fit against).
pub fn report_csv_row(report: &ComplexityReport) -> String {
    let bm = mult_shape(report.m);
    let ba = add_shape(report.m);
    let ra = report.adds_addnet.map_or(0, |c| c.total()) as f64 / ba;
    csv_row(report, bm, ba, report.mults as f64 / bm, ra)
}

pub fn bound_table_csv(table: &BoundTable) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in &table.rows {
        out.push_str(&csv_row(
            &row.report,
            row.bound_mult,
            row.bound_add,
            row.ratio_mult,
            row.ratio_add,
        ));
        out.push('\n');
    }
    out
}

pub fn report_text(report: &ComplexityReport) -> String {
    let addnet = report
        .adds_addnet
        .map_or("-".to_string(), |c| format!("{} (pre {} / mvp {} / post {})", c.total(), c.pre, c.mvp, c.post));
    format!(
        "m={} n={} k={} profile={}\n\
         multiplications:  {} genuine, {} raw\n\
         conv additions:   {} ({} pre, {} post)\n\
         network additions: {}\n\
         direct additions: {}\n\
         weighted total:   {} (one mult = {} adds)\n",
        report.m,
        report.n,
        report.k,
        crate::planner::profile_label(report.profile),
        report.mults,
        report.mults_raw,
        report.adds_conv(),
        report.conv_pre_adds,
        report.conv_post_adds,
        addnet,
        report.adds_direct,
        report.total_weighted,
        mult_weight(report.m),
    )
}

pub fn bound_table_text(table: &BoundTable) -> String {
    let mut out = format!(
        "anchor m={} scale_mult={:.4} scale_add={:.4}\n{:>3} {:>7} {:>5} {:>9} {:>11} {:>11} {:>11} {:>10} {:>10}\n",
        table.anchor_m,
        table.scale_mult,
        table.scale_add,
        "m",
        "n",
        "k",
        "mults",
        "adds_net",
        "bound_mult",
        "bound_add",
        "ratio_mult",
        "ratio_add"
    );
    for row in &table.rows {
        out.push_str(&format!(
            "{:>3} {:>7} {:>5} {:>9} {:>11} {:>11.0} {:>11.0} {:>10.4} {:>10.4}\n",
            row.report.m,
            row.report.n,
            row.report.k,
            row.report.mults,
            row.report.adds_addnet.map_or(0, |c| c.total()),
            row.bound_mult,
            row.bound_add,
            row.ratio_mult,
            row.ratio_add,
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planner::build_plan;

    fn gf(m: usize) -> FieldSpec {
        FieldSpec::new(m, None).unwrap()
    }

    fn full_report(m: usize, profile: ConvProfile) -> ComplexityReport {
        let f = gf(m);
        let plan = build_plan_with(&f, f.group_order(), profile).unwrap();
        let net = build_addnet(build_block_form(&plan).unwrap()).unwrap();
        count(&plan, Some(&net))
    }

    #[test]
    fn raw_products_n7_padded() {
        // Coset sizes 1, 3, 3 with the padded generator: 1 + 9 + 9.
        let report = full_report(3, ConvProfile::PaddedKaratsuba);
        assert_eq!(report.mults_raw, 19);
        // The size-1 coset kernel is the constant 1, always elided.
        assert!(report.mults <= report.mults_raw - 1);
    }

    #[test]
    fn raw_products_n15_padded() {
        // Coset sizes 1, 4, 4, 2, 4: 1 + 9 + 9 + 3 + 9.
        let report = full_report(4, ConvProfile::PaddedKaratsuba);
        assert_eq!(report.mults_raw, 31);
    }

    #[test]
    fn weighted_total_uses_2m_minus_1() {
        assert_eq!(mult_weight(4), 7);
        assert_eq!(mult_weight(8), 15);
        let report = full_report(4, ConvProfile::PaddedKaratsuba);
        let expected = 7 * report.mults
            + report.adds_conv()
            + report.adds_addnet.unwrap().total();
        assert_eq!(report.total_weighted, expected);
    }

    #[test]
    fn count_without_network_uses_direct_baseline() {
        let f = gf(3);
        let plan = build_plan(&f, 7).unwrap();
        let report = count(&plan, None);
        assert!(report.adds_addnet.is_none());
        assert_eq!(
            report.total_weighted,
            mult_weight(3) * report.mults + report.adds_conv() + report.adds_direct
        );
    }

    #[test]
    fn shape_ratio_matches_direct_formula() {
        let e = 1.5f64.log2();
        let expected = (1023.0 * 1023f64.log2().powf(e)) / (15.0 * 15f64.log2().powf(e));
        let got = mult_shape(10) / mult_shape(4);
        assert!((got - expected).abs() < 1e-12 * expected);
        // The additive shape uses the log2(8/3) exponent.
        let ea = (8.0f64 / 3.0).log2();
        let expected_add = 1023.0 * 1023.0 / 1023f64.log2().powf(ea);
        assert!((add_shape(10) - expected_add).abs() < 1e-9 * expected_add);
    }

    #[test]
    fn bound_table_anchor_ratio_is_one() {
        let table = bound_table(4, 6, 4).unwrap();
        assert_eq!(table.rows.len(), 3);
        let anchor = &table.rows[0];
        assert!((anchor.ratio_mult - 1.0).abs() < 1e-12);
        assert!((anchor.ratio_add - 1.0).abs() < 1e-12);
        // Deterministic: a second build gives identical rows.
        let again = bound_table(4, 6, 4).unwrap();
        for (a, b) in table.rows.iter().zip(&again.rows) {
            assert_eq!(a.report, b.report);
            assert_eq!(a.ratio_mult.to_bits(), b.ratio_mult.to_bits());
        }
    }

    #[test]
    fn bound_table_rejects_bad_anchor() {
        assert!(bound_table(4, 6, 7).is_err());
    }

    #[test]
    fn csv_schema_shape() {
        let report = full_report(3, ConvProfile::PaddedKaratsuba);
        let row = report_csv_row(&report);
        assert_eq!(row.split(',').count(), CSV_HEADER.split(',').count());
        let table = bound_table(4, 5, 4).unwrap();
        let csv = bound_table_csv(&table);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert_eq!(lines.count(), 2);
    }

    #[test]
    fn short_profile_reduces_products() {
        let padded = full_report(6, ConvProfile::PaddedKaratsuba);
        let short = full_report(6, ConvProfile::ShortConvolution);
        assert!(short.mults_raw < padded.mults_raw);
        assert!(short.mults < padded.mults);
        // Network counts do not depend on the convolution profile.
        assert_eq!(short.adds_addnet, padded.adds_addnet);
        assert_eq!(short.adds_direct, padded.adds_direct);
    }
}
