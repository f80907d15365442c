use pyo3::prelude::*;

#[pymodule]
fn _kerovlab(_py: Python<'_>, _m: &Bound<'_, PyModule>) -> PyResult<()> {
    Ok(())
}
