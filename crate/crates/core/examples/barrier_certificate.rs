//! Composite sub- and supersolution barriers around a radial pair at
//! `m = 100`: automatic constant selection, then the `A0 = 0` control.

use stiff_pressure_lab::barriers::{auto_barrier, verify_barrier, BarrierBundle, BarrierKind, PairSpec, RadialProfilePair};
use stiff_pressure_lab::Result;

fn main() -> Result<()> {
    let pair = RadialProfilePair::build(PairSpec::standard())?;
    for kind in [BarrierKind::Sub, BarrierKind::Super] {
        match auto_barrier(&pair, 100.0, kind, 1e-8, 0.99) {
            Ok(bundle) => {
                let r = bundle.report.as_ref().expect("verified");
                println!(
                    "{kind:?}: A0 = {}, inner {:.4}, outer {:.4}, min gap {:.4}",
                    bundle.a0,
                    r.inner.fraction(),
                    r.outer.fraction(),
                    r.min_gap()
                );
            }
            Err(e) => println!("{kind:?}: {e}"),
        }
        let zero = BarrierBundle::build(&pair, 100.0, 0.0, kind)?;
        let r = verify_barrier(&zero, &pair, 1e-8, 0.99)?;
        println!(
            "{kind:?} with A0 = 0: pass {}, inner {:.4}, worst margin {:.3e}",
            r.pass,
            r.inner.fraction(),
            r.worst_margin()
        );
    }
    Ok(())
}
