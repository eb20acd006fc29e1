//! Fixtures shared by the benchmarks.

use banachlab::{parse_space, NormedSpace, Resolution};

/// The plane spaces every benchmark group runs over.
pub const PLANE_SPECS: [&str; 5] = ["lp(2,2)", "lp(2,1)", "lp(2,inf)", "arc2d(ex61)", "arc2d(fig5)"];

pub fn space(spec: &str) -> NormedSpace {
    parse_space(spec, &Resolution::default()).expect("catalog spec").space().clone()
}

pub fn plane_spaces() -> Vec<NormedSpace> {
    PLANE_SPECS.iter().map(|s| space(s)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_build() {
        assert!(plane_spaces().iter().all(|s| s.dim() == 2));
    }
}
