use std::sync::Arc;

type Fun = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A scalar function of t ∈ [0,1] together with its derivative.
#[derive(Clone)]
pub struct Schedule {
    f: Fun,
    df: Fun,
}

impl std::fmt::Debug for Schedule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Schedule({} -> {})", self.value(0.0), self.value(1.0))
    }
}

impl Schedule {
    pub fn new(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        df: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Schedule { f: Arc::new(f), df: Arc::new(df) }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(move |_| c, |_| 0.0)
    }

    pub fn linear(a: f64, b: f64) -> Self {
        Self::new(move |t| a + (b - a) * t, move |_| b - a)
    }

    /// Piecewise-linear interpolation of values on a uniform grid over [0,1].
    pub fn from_samples(values: Vec<f64>) -> Self {
        assert!(values.len() >= 2);
        let v = Arc::new(values);
        let v2 = v.clone();
        let locate = |n: usize, t: f64| {
            let x = t.clamp(0.0, 1.0) * (n - 1) as f64;
            let i = (x.floor() as usize).min(n - 2);
            (i, x - i as f64)
        };
        Self::new(
            move |t| {
                let (i, u) = locate(v.len(), t);
                v[i] + (v[i + 1] - v[i]) * u
            },
            move |t| {
                let (i, _) = locate(v2.len(), t);
                (v2[i + 1] - v2[i]) * (v2.len() - 1) as f64
            },
        )
    }

    pub fn value(&self, t: f64) -> f64 {
        (self.f)(t)
    }

    pub fn rate(&self, t: f64) -> f64 {
        (self.df)(t)
    }
}
