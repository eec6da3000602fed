from setuptools import setup, find_packages

setup(
    name='pdrsmith',
    version='0.1.0',
    packages=find_packages(exclude=['tests', 'tests.*']),
    package_data={
        'pdrsmith': ['slots.json'],
        'pdrsmith.evolve': ['templates/*.j2'],
    },
    python_requires='>=3.11',
    install_requires=[
        'click>=8.1.0',
        'rich>=13.0.0',
        'python-dotenv>=1.0.0',
        'matplotlib>=3.7.0',
        'jinja2>=3.1.0',
        'pydantic>=2.5.0',
        'httpx>=0.25.0',
    ],
    extras_require={
        'test': ['pytest>=7.4.0'],
    },
    entry_points={
        'console_scripts': [
            'pdrsmith=pdrsmith.cli:cli',
        ],
    },
)
