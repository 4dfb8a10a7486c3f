//! Sample-size schedules, their summability diagnostics, and the
//! geometric-rate reference bound.

use retro_opt::schedule::{
    check_summability, rate_bound, BoundDenominator, RateCheckConfig, SampleSizeSchedule, ToleranceSchedule,
};

fn main() -> retro_opt::Result<()> {
    let schedules = [
        SampleSizeSchedule::Geometric { c1: 2.0, m1: 10 },
        SampleSizeSchedule::damped_default(),
        SampleSizeSchedule::FixedList { list: vec![10, 20, 40, 80, 160] },
    ];
    for s in &schedules {
        println!("{s:?}");
        println!("  M_1..M_5 = {:?}", s.sizes(5)?);
        let r = check_summability(s, &ToleranceSchedule::Deterministic { c2: 1.0 }, 5)?;
        println!(
            "  verdict {:?}, partial sum {:.5}, bound {:?}, growth exponent {:?}",
            r.verdict, r.partial_sum, r.analytic_bound, r.growth_exponent
        );
    }

    let mut cfg = RateCheckConfig {
        c1: 2.0,
        c2: 1.0,
        m1: 50,
        l_estimate: Some(4.0),
        sigma_estimate: Some(2.0),
        lambda_estimate: Some(0.5),
        denominator: BoundDenominator::SqrtM1,
    };
    for denominator in [BoundDenominator::SqrtM1, BoundDenominator::M1] {
        cfg.denominator = denominator;
        let bounds: Vec<String> = (1..=6).map(|k| rate_bound(&cfg, k).map(|b| format!("{b:.3e}"))).collect::<Result<_, _>>()?;
        println!("rate bound ({denominator:?}) for k = 1..6: {}", bounds.join(" "));
    }
    Ok(())
}
