from setuptools import setup, find_packages

setup(
    name="ising_fluct",
    version="0.1.0",
    description="Entanglement entropy and its fluctuations in the transverse-field Ising chain",
    license="MIT license",
    packages=find_packages(exclude=["tests"]),
    install_requires=[
        "numpy",
        "scipy",
        "pyyaml",
    ],
    extras_require={"test": ["pytest", "hypothesis"]},
    include_package_data=True,
    package_data={"ising_fluct": ["configuration/*.yaml"]},
    entry_points={"console_scripts": ["ising-fluct=ising_fluct.cli:main"]},
)
